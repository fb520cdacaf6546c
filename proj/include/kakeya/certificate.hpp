#pragma once

// Replayable certificates. Each step records exact integer counts and one
// inequality between monomials in those counts (with rational exponents and
// explicit constants). Replaying a certificate re-decides every inequality
// from the recorded counts alone.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kakeya/errors.hpp"
#include "kakeya/exact.hpp"

namespace kakeya {

/// base^exponent where base is either a named count or an explicit constant.
struct Factor {
    std::string count;  // empty for a constant
    BigRational constant = 1;
    Rational exponent = 1;
};

class Monomial {
public:
    Monomial() = default;

    static Monomial one() { return {}; }
    static Monomial count(std::string name, Rational e = 1) { return Monomial{}.times(std::move(name), e); }
    static Monomial constant(BigRational c, Rational e = 1) { return Monomial{}.times_const(std::move(c), e); }

    Monomial& times(std::string name, Rational e = 1) {
        factors_.push_back({std::move(name), 1, e});
        return *this;
    }
    Monomial& times_const(BigRational c, Rational e = 1) {
        factors_.push_back({"", std::move(c), e});
        return *this;
    }

    const std::vector<Factor>& factors() const noexcept { return factors_; }

    std::vector<PowerTerm> terms(const std::map<std::string, std::int64_t>& counts) const {
        std::vector<PowerTerm> out;
        for (const auto& f : factors_) {
            if (f.count.empty()) {
                out.push_back({f.constant, f.exponent});
            } else {
                auto it = counts.find(f.count);
                if (it == counts.end()) throw InvalidInput("certificate references unknown count '" + f.count + "'");
                out.push_back({BigRational(it->second), f.exponent});
            }
        }
        return out;
    }

    double log_value(const std::map<std::string, std::int64_t>& counts) const {
        double s = 0;
        for (const auto& t : terms(counts)) {
            if (t.exponent.numerator() == 0) continue;
            const double b = big_to_double(t.base);
            s += to_double(t.exponent) * std::log(b);
        }
        return s;
    }

    std::string str() const {
        if (factors_.empty()) return "1";
        std::ostringstream os;
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            const auto& f = factors_[i];
            if (i) os << "*";
            if (f.count.empty())
                os << f.constant.str();
            else
                os << f.count;
            if (f.exponent != Rational(1)) os << "^(" << to_string(f.exponent) << ")";
        }
        return os.str();
    }

private:
    std::vector<Factor> factors_;
};

enum class Relation { le, lt, ge, gt, eq, info };

inline const char* relation_symbol(Relation r) {
    switch (r) {
        case Relation::le: return "<=";
        case Relation::lt: return "<";
        case Relation::ge: return ">=";
        case Relation::gt: return ">";
        case Relation::eq: return "==";
        case Relation::info: return "~";
    }
    return "?";
}

inline bool relation_holds(Relation r, int cmp) {
    switch (r) {
        case Relation::le: return cmp <= 0;
        case Relation::lt: return cmp < 0;
        case Relation::ge: return cmp >= 0;
        case Relation::gt: return cmp > 0;
        case Relation::eq: return cmp == 0;
        case Relation::info: return true;
    }
    return false;
}

struct Step {
    std::string id;
    std::string desc;
    std::map<std::string, std::int64_t> counts;
    Monomial lhs;
    Relation relation = Relation::info;
    Monomial rhs;
    bool ok = true;
    /// lhs / rhs as realized on the recorded counts
    double constant = 0;
    std::string note;

    std::string inequality() const { return lhs.str() + " " + relation_symbol(relation) + " " + rhs.str(); }

    bool evaluate() const {
        if (relation == Relation::info) return true;
        return relation_holds(relation, compare_products(lhs.terms(counts), rhs.terms(counts)));
    }

    double realized() const {
        const double l = lhs.log_value(counts);
        const double r = rhs.log_value(counts);
        if (std::isinf(r) && r < 0) return std::isinf(l) && l < 0 ? 1.0 : std::numeric_limits<double>::infinity();
        if (std::isinf(l) && l < 0) return 0.0;
        return std::exp(l - r);
    }
};

enum class Verdict { valid, refuted };

class Certificate {
public:
    Certificate() = default;
    explicit Certificate(std::string name) : name_(std::move(name)) {}

    /// Appends a step, deciding its inequality from the recorded counts.
    const Step& add(Step s) {
        s.ok = s.evaluate();
        s.constant = s.realized();
        if (!s.ok && verdict_ == Verdict::valid) {
            verdict_ = Verdict::refuted;
            failing_ = s.id;
        }
        steps_.push_back(std::move(s));
        return steps_.back();
    }

    /// Convenience for an inequality step.
    const Step& check(std::string id, std::string desc, std::map<std::string, std::int64_t> counts, Monomial lhs,
                      Relation rel, Monomial rhs, std::string note = {}) {
        Step s;
        s.id = std::move(id);
        s.desc = std::move(desc);
        s.counts = std::move(counts);
        s.lhs = std::move(lhs);
        s.relation = rel;
        s.rhs = std::move(rhs);
        s.note = std::move(note);
        return add(std::move(s));
    }

    /// An informational step: counts and a realized ratio, no verdict impact.
    const Step& record(std::string id, std::string desc, std::map<std::string, std::int64_t> counts,
                       Monomial lhs = {}, Monomial rhs = {}, std::string note = {}) {
        return check(std::move(id), std::move(desc), std::move(counts), std::move(lhs), Relation::info,
                     std::move(rhs), std::move(note));
    }

    void note(std::string n) { notes_.push_back(std::move(n)); }
    void set_result(const std::string& key, std::string value) { results_[key] = std::move(value); }

    const std::string& name() const noexcept { return name_; }
    const std::vector<Step>& steps() const noexcept { return steps_; }
    const std::vector<std::string>& notes() const noexcept { return notes_; }
    const std::map<std::string, std::string>& results() const noexcept { return results_; }
    Verdict verdict() const noexcept { return verdict_; }
    bool valid() const noexcept { return verdict_ == Verdict::valid; }
    const std::string& failing_step() const noexcept { return failing_; }

    const Step* find(const std::string& id) const {
        for (const auto& s : steps_)
            if (s.id == id) return &s;
        return nullptr;
    }

    /// Re-decides every step from its recorded counts alone.
    Verdict replay() const {
        for (const auto& s : steps_)
            if (!s.evaluate()) return Verdict::refuted;
        return Verdict::valid;
    }

private:
    std::string name_;
    std::vector<Step> steps_;
    std::vector<std::string> notes_;
    std::map<std::string, std::string> results_;
    Verdict verdict_ = Verdict::valid;
    std::string failing_;
};

}  // namespace kakeya
