#pragma once

#include <string>
#include <utility>
#include <vector>

namespace randlab {

/// One named check with exact evidence. Values are rendered rationals ("p/q")
/// or other literal strings; never decimals.
struct CheckRecord {
    std::string name;
    bool pass = true;
    std::string detail;
    std::vector<std::pair<std::string, std::string>> values;
};

/// PASS iff every record passes; `first_failure` indexes the first failing one.
struct CheckReport {
    std::vector<CheckRecord> records;

    bool pass() const {
        for (const auto& r : records) {
            if (!r.pass) return false;
        }
        return true;
    }

    const CheckRecord* first_failure() const {
        for (const auto& r : records) {
            if (!r.pass) return &r;
        }
        return nullptr;
    }

    void add(CheckRecord r) { records.push_back(std::move(r)); }
};

}  // namespace randlab
