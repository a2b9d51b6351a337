#include "affwalk/records.hpp"

#include <cstdio>

#include "affwalk/errors.hpp"

namespace affwalk {

std::string format_double(double value) {
    if (value == 0.0) value = 0.0;  // collapse negative zero
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

Record& Record::add(std::string key, std::string value) {
    fields_.emplace_back(std::move(key), std::move(value));
    return *this;
}

Record& Record::add(std::string key, double value) {
    return add(std::move(key), format_double(value));
}

Record& Record::add(std::string key, long value) {
    return add(std::move(key), std::to_string(value));
}

const std::string& Record::get(std::string_view key) const {
    for (const auto& [k, v] : fields_) {
        if (k == key) return v;
    }
    throw ValidationError("record has no field '" + std::string(key) + "'");
}

bool Record::has(std::string_view key) const {
    for (const auto& [k, v] : fields_) {
        if (k == key) return true;
    }
    return false;
}

std::string Record::line() const {
    std::string out;
    for (const auto& [k, v] : fields_) {
        if (!out.empty()) out += ' ';
        out += k;
        out += '=';
        out += v;
    }
    return out;
}

Record Record::parse(std::string_view line) {
    Record rec;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        if (pos >= line.size()) break;
        std::size_t end = line.find(' ', pos);
        if (end == std::string_view::npos) end = line.size();
        std::string_view field = line.substr(pos, end - pos);
        std::size_t eq = field.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("bad record field: '" + std::string(field) +
                                  "'");
        }
        rec.add(std::string(field.substr(0, eq)),
                std::string(field.substr(eq + 1)));
        pos = end;
    }
    return rec;
}

}  // namespace affwalk
