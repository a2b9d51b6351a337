#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace affwalk {

// Floats are emitted with 12 significant digits everywhere.
std::string format_double(double value);

// One line-delimited output record: ordered key=value fields separated by
// single spaces. Values must not contain spaces. Every subcommand's writer
// emits records that this parser reads back.
class Record {
public:
    Record() = default;

    Record& add(std::string key, std::string value);
    Record& add(std::string key, double value);
    Record& add(std::string key, long value);

    const std::string& get(std::string_view key) const;
    bool has(std::string_view key) const;
    const std::vector<std::pair<std::string, std::string>>& fields() const {
        return fields_;
    }

    std::string line() const;
    static Record parse(std::string_view line);

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace affwalk
