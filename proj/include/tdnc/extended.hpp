#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace tdnc {

// A real value extended with a distinguished "unbounded" marker. Arithmetic
// with unbounded is absorbing. Used for suprema over unbounded index sets.
class extended_value {
public:
    extended_value() : v_(0.0), unbounded_(false) {}

    static extended_value finite(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("extended_value: non-finite");
        extended_value e;
        e.v_ = v;
        return e;
    }
    static extended_value unbounded() {
        extended_value e;
        e.unbounded_ = true;
        return e;
    }

    bool is_unbounded() const { return unbounded_; }
    bool is_finite() const { return !unbounded_; }

    double value() const {
        if (unbounded_) throw std::domain_error("extended_value: unbounded has no value");
        return v_;
    }
    double value_or(double fallback) const { return unbounded_ ? fallback : v_; }

    extended_value operator+(const extended_value& o) const {
        if (unbounded_ || o.unbounded_) return unbounded();
        return finite(v_ + o.v_);
    }
    extended_value operator+(double d) const {
        if (unbounded_) return unbounded();
        return finite(v_ + d);
    }

    friend extended_value max(const extended_value& a, const extended_value& b) {
        if (a.unbounded_ || b.unbounded_) return unbounded();
        return finite(std::max(a.v_, b.v_));
    }

    bool operator==(const extended_value& o) const {
        if (unbounded_ != o.unbounded_) return false;
        return unbounded_ || v_ == o.v_;
    }

    friend std::ostream& operator<<(std::ostream& os, const extended_value& e) {
        if (e.unbounded_) return os << "unbounded";
        return os << e.v_;
    }

private:
    double v_;
    bool unbounded_;
};

}  // namespace tdnc
