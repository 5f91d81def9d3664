#include "uniwalsh/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace uniwalsh {

Check strict_less(std::string name, double value, double bound, std::string note) {
    const double m = bound - value;
    return {std::move(name), value, bound, m, value < bound, std::move(note)};
}

Check less_equal(std::string name, double value, double bound, std::string note) {
    const double m = bound - value;
    return {std::move(name), value, bound, m, value <= bound + kStrictSlack, std::move(note)};
}

Check strict_greater(std::string name, double value, double bound, std::string note) {
    const double m = value - bound;
    return {std::move(name), value, bound, m, value > bound, std::move(note)};
}

Check boolean_check(std::string name, bool ok, std::string note) {
    return {std::move(name), ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : -1.0, ok, std::move(note)};
}

Check not_claimed(std::string name, std::string note) {
    return {std::move(name), 0.0, 0.0, 0.0, true, "not claimed: " + std::move(note)};
}

void Report::append(const Report& other, const std::string& prefix) {
    for (Check c : other.checks_) {
        c.name = prefix + c.name;
        checks_.push_back(std::move(c));
    }
}

bool Report::all_passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
}

const Check* Report::find(const std::string& name) const {
    for (const auto& c : checks_)
        if (c.name == name) return &c;
    return nullptr;
}

std::string Report::failures() const {
    std::string out;
    for (const auto& c : checks_) {
        if (c.passed) continue;
        if (!out.empty()) out += ", ";
        out += c.name;
    }
    return out;
}

void Report::print(std::ostream& os, const std::string& indent) const {
    char buf[256];
    for (const auto& c : checks_) {
        std::snprintf(buf, sizeof buf, "%-4s %-36s value=%-13.6g bound=%-13.6g margin=%-+13.6g",
                      c.passed ? "ok" : "FAIL", c.name.c_str(), c.value, c.bound, c.margin);
        os << indent << buf;
        if (!c.note.empty()) os << " " << c.note;
        os << '\n';
    }
}

}  // namespace uniwalsh
