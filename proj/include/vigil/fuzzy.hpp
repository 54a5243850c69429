#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/errors.hpp"
#include "vigil/features.hpp"

namespace vigil::fuzzy {

// Triangular membership function with feet a, c and apex b. The two
// shoulder forms saturate: a == b holds degree 1 for every x <= b,
// b == c holds degree 1 for every x >= b.
struct MembershipFunction {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double degree(double x) const;
};

MembershipFunction make_triangle(double a, double b, double c);

enum class Term { Small, Medium, Large };
constexpr std::size_t kNumTerms = 3;
std::string_view term_name(Term t);  // "S", "M", "L"

// One input or output variable with its universe and S/M/L terms.
struct LinguisticVariable {
    std::string name;  // "A", "V", "D", "DS"
    double lo = 0.0;
    double hi = 1.0;
    std::array<MembershipFunction, kNumTerms> terms;

    double degree(Term t, double x) const { return terms[static_cast<std::size_t>(t)].degree(x); }
};

enum class VarId { A, V, D };

// Conjunction of up to three input literals implying one DS term.
struct FuzzyRule {
    std::vector<std::pair<VarId, Term>> antecedent;  // each variable at most once
    Term consequent = Term::Small;
};

using RuleBase = std::vector<FuzzyRule>;

// The built-in nine-rule base. Rule 1 reads "if A is Medium then DS is
// Small" (single-literal antecedent).
const RuleBase& default_rules();

// Parse a rule file: one rule per line, '#' comments, grammar
//   A=S & V=S & D=S -> DS=S
RuleBase parse_rules(std::string_view text);
RuleBase load_rules(const std::filesystem::path& path);

// Fuzzy C-means over a 1-D point set.
struct FcmParams {
    int clusters = 3;
    double fuzzifier = 2.0;  // m, > 1
    double tol = 1e-6;       // max center shift at convergence
    int max_iter = 300;
};

struct FcmResult {
    std::vector<double> centers;                    // sorted ascending
    std::vector<std::vector<double>> memberships;   // per point, per (sorted) center
    std::vector<double> objective_history;          // J after each iteration
    int iterations = 0;
    bool converged = false;
};

// Standard FCM alternating iteration with deterministic seeding:
// initial centers sit at the 1/6, 3/6, 5/6 ... quantiles of the
// distinct sorted values. Requires at least `clusters` distinct
// values. Memberships of each point sum to 1; the objective
// sum(u^m d^2) never increases.
FcmResult fcm_cluster(std::span<const double> points, const FcmParams& params = {});

// Result of calibrating one input variable against its epoch series.
struct CalibratedVariable {
    LinguisticVariable variable;
    std::array<double, kNumTerms> centers{};  // term apexes, ascending
    bool fallback = false;                    // uniform partition was used
};

// FCM with c=3 places the S/M/L apexes; the universe is the observed
// range padded by 5%. Series with fewer than three distinct values
// fall back to a uniform partition (a constant series widens to a
// 0.1-wide range first).
CalibratedVariable calibrate_variable(std::string name, std::span<const double> values,
                                      const FcmParams& params = {});

// Fixed output variable: DS on [0,1] with terms (0,0,0.5), (0,0.5,1),
// (0.5,1,1).
LinguisticVariable ds_variable();

// A ready-to-run inference system.
struct CalibratedSystem {
    LinguisticVariable arousal;
    LinguisticVariable valence;
    LinguisticVariable dominance;
    LinguisticVariable output;  // DS
    RuleBase rules;
};

CalibratedSystem make_system(CalibratedVariable arousal, CalibratedVariable valence,
                             CalibratedVariable dominance, RuleBase rules = default_rules());

// Mamdani aggregate sampled on the DS universe.
constexpr std::size_t kOutputSamples = 10001;

struct AggregatedSet {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> degrees;  // kOutputSamples points, evenly spaced

    double x_at(std::size_t i) const {
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(degrees.size() - 1);
    }
};

// Firing strength of every rule for one feature vector: min over the
// antecedent literal degrees.
std::vector<double> rule_strengths(const CalibratedSystem& system,
                                   const features::FeatureVector& x);

// Min-implication, max-aggregation Mamdani inference: each rule clips
// its consequent term at its firing strength; the aggregate is the
// pointwise max across rules.
AggregatedSet infer(const CalibratedSystem& system, const features::FeatureVector& x);

struct Defuzzified {
    double value = 0.5;
    bool indeterminate = false;
};

// Centroid of the sampled set (trapezoid-weighted). An all-zero
// aggregate is reported as indeterminate with the 0.5 sentinel.
Defuzzified defuzzify(const AggregatedSet& aggregate);

struct Classification {
    double ds = 0.5;
    bool indeterminate = false;
    std::vector<double> rule_strengths;
};

// infer + defuzzify with a per-rule firing trace.
Classification classify(const CalibratedSystem& system, const features::FeatureVector& x);

}  // namespace vigil::fuzzy
