#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uniwalsh {

/// Slack for non-strict comparisons and certificate thresholds.
inline constexpr double kStrictSlack = 1e-9;

/// One verified inequality. margin = bound - value, so margin >= 0 reads as "holds".
struct Check {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool passed = false;
    std::string note;

    bool operator==(const Check&) const = default;
};

/// value < bound, no tolerance.
Check strict_less(std::string name, double value, double bound, std::string note = {});
/// value <= bound up to kStrictSlack (absorbs synthesis round-off).
Check less_equal(std::string name, double value, double bound, std::string note = {});
/// value > bound, no tolerance; margin = value - bound.
Check strict_greater(std::string name, double value, double bound, std::string note = {});
/// Boolean condition with no numeric content (margin 0 or -1).
Check boolean_check(std::string name, bool ok, std::string note = {});
/// A condition deliberately not evaluated (rect-only mode); counts as passed.
Check not_claimed(std::string name, std::string note);

class Report {
public:
    void add(Check c) { checks_.push_back(std::move(c)); }
    void append(const Report& other, const std::string& prefix = {});
    const std::vector<Check>& checks() const { return checks_; }
    bool all_passed() const;
    bool empty() const { return checks_.empty(); }
    const Check* find(const std::string& name) const;
    /// Names of failed checks, comma-separated.
    std::string failures() const;
    void print(std::ostream& os, const std::string& indent = "  ") const;

    bool operator==(const Report&) const = default;

private:
    std::vector<Check> checks_;
};

}  // namespace uniwalsh
