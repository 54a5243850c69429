#include "vigil/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace vigil::fuzzy {

namespace {

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto begin = s.find_first_not_of(ws);
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(ws);
    return s.substr(begin, end - begin + 1);
}

}  // namespace

double MembershipFunction::degree(double x) const {
    if (a == b) {  // left shoulder: saturates below the apex
        if (x <= b) return 1.0;
        if (x >= c) return 0.0;
        return (c - x) / (c - b);
    }
    if (b == c) {  // right shoulder: saturates above the apex
        if (x >= b) return 1.0;
        if (x <= a) return 0.0;
        return (x - a) / (b - a);
    }
    if (x <= a || x >= c) return 0.0;
    if (x <= b) return (x - a) / (b - a);
    return (c - x) / (c - b);
}

MembershipFunction make_triangle(double a, double b, double c) {
    if (!(a <= b && b <= c) || !(a < c)) {
        throw InputError("invalid membership triple (" + std::to_string(a) + ", " +
                         std::to_string(b) + ", " + std::to_string(c) +
                         "): need a <= b <= c with a < c");
    }
    return MembershipFunction{a, b, c};
}

std::string_view term_name(Term t) {
    switch (t) {
        case Term::Small: return "S";
        case Term::Medium: return "M";
        case Term::Large: return "L";
    }
    return "?";
}

const RuleBase& default_rules() {
    static const RuleBase rules = {
        {{{VarId::A, Term::Medium}}, Term::Small},
        {{{VarId::A, Term::Small}, {VarId::V, Term::Small}, {VarId::D, Term::Small}},
         Term::Small},
        {{{VarId::A, Term::Large}, {VarId::V, Term::Large}, {VarId::D, Term::Large}},
         Term::Large},
        {{{VarId::A, Term::Large}, {VarId::V, Term::Small}, {VarId::D, Term::Medium}},
         Term::Small},
        {{{VarId::A, Term::Large}, {VarId::V, Term::Small}, {VarId::D, Term::Large}},
         Term::Small},
        {{{VarId::A, Term::Small}, {VarId::V, Term::Medium}, {VarId::D, Term::Medium}},
         Term::Small},
        {{{VarId::A, Term::Small}, {VarId::V, Term::Large}, {VarId::D, Term::Medium}},
         Term::Medium},
        {{{VarId::A, Term::Small}, {VarId::V, Term::Medium}, {VarId::D, Term::Large}},
         Term::Small},
        {{{VarId::A, Term::Small}, {VarId::V, Term::Large}, {VarId::D, Term::Large}},
         Term::Medium},
    };
    return rules;
}

namespace {

Term parse_term(std::string_view token, int line_no) {
    if (token == "S") return Term::Small;
    if (token == "M") return Term::Medium;
    if (token == "L") return Term::Large;
    throw InputError("rules line " + std::to_string(line_no) + ": unknown term '" +
                     std::string(token) + "' (expected S, M, or L)");
}

// Splits "NAME=TERM" and returns the two trimmed tokens.
std::pair<std::string_view, std::string_view> split_literal(std::string_view literal,
                                                            int line_no) {
    auto eq = literal.find('=');
    if (eq == std::string_view::npos || literal.find('=', eq + 1) != std::string_view::npos) {
        throw InputError("rules line " + std::to_string(line_no) + ": expected NAME=TERM, got '" +
                         std::string(literal) + "'");
    }
    return {trim(literal.substr(0, eq)), trim(literal.substr(eq + 1))};
}

VarId parse_var(std::string_view token, int line_no) {
    if (token == "A") return VarId::A;
    if (token == "V") return VarId::V;
    if (token == "D") return VarId::D;
    throw InputError("rules line " + std::to_string(line_no) + ": unknown input variable '" +
                     std::string(token) + "' (expected A, V, or D)");
}

}  // namespace

RuleBase parse_rules(std::string_view text) {
    RuleBase rules;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        auto arrow = line.find("->");
        if (arrow == std::string_view::npos ||
            line.find("->", arrow + 2) != std::string_view::npos) {
            throw InputError("rules line " + std::to_string(line_no) +
                             ": expected exactly one '->'");
        }
        std::string_view lhs = trim(line.substr(0, arrow));
        std::string_view rhs = trim(line.substr(arrow + 2));

        auto [out_var, out_term] = split_literal(rhs, line_no);
        if (out_var != "DS") {
            throw InputError("rules line " + std::to_string(line_no) +
                             ": consequent must assign DS, got '" + std::string(out_var) + "'");
        }

        FuzzyRule rule;
        rule.consequent = parse_term(out_term, line_no);

        std::size_t lit_pos = 0;
        while (true) {
            auto amp = lhs.find('&', lit_pos);
            std::string_view literal =
                trim(lhs.substr(lit_pos, amp == std::string_view::npos ? lhs.size() - lit_pos
                                                                       : amp - lit_pos));
            if (literal.empty()) {
                throw InputError("rules line " + std::to_string(line_no) +
                                 ": empty antecedent literal");
            }
            auto [var_token, term_token] = split_literal(literal, line_no);
            VarId var = parse_var(var_token, line_no);
            for (const auto& [existing, _] : rule.antecedent) {
                if (existing == var) {
                    throw InputError("rules line " + std::to_string(line_no) + ": variable '" +
                                     std::string(var_token) + "' appears twice");
                }
            }
            rule.antecedent.emplace_back(var, parse_term(term_token, line_no));
            if (amp == std::string_view::npos) break;
            lit_pos = amp + 1;
        }
        rules.push_back(std::move(rule));
    }
    if (rules.empty()) throw InputError("rule file contains no rules");
    return rules;
}

RuleBase load_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open rule file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("failed reading rule file: " + path.string());
    return parse_rules(buffer.str());
}

namespace {

void check_fcm_params(const FcmParams& params) {
    if (params.clusters < 1) throw InputError("cluster count must be at least 1");
    if (!(params.fuzzifier > 1.0)) throw InputError("fuzzifier must be greater than 1");
    if (!(params.tol > 0.0)) throw InputError("convergence tolerance must be positive");
    if (params.max_iter < 1) throw InputError("iteration limit must be at least 1");
}

// Linear-interpolated quantile q of a sorted array.
double quantile(const std::vector<double>& sorted, double q) {
    double position = q * static_cast<double>(sorted.size() - 1);
    auto k = static_cast<std::size_t>(position);
    double frac = position - static_cast<double>(k);
    if (k + 1 >= sorted.size()) return sorted.back();
    return sorted[k] + frac * (sorted[k + 1] - sorted[k]);
}

// Memberships of every point against the given centers; returns the
// objective sum(u^m d^2) as a by-product.
double update_memberships(std::span<const double> points, const std::vector<double>& centers,
                          double fuzzifier, std::vector<std::vector<double>>& memberships) {
    const std::size_t c = centers.size();
    const double exponent = 2.0 / (fuzzifier - 1.0);
    double objective = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        auto& u = memberships[k];
        std::vector<double> dist(c);
        std::size_t coincident = 0;
        for (std::size_t i = 0; i < c; ++i) {
            dist[i] = std::abs(points[k] - centers[i]);
            if (dist[i] == 0.0) ++coincident;
        }
        if (coincident > 0) {
            // A point sitting exactly on a center belongs to the
            // coincident centers alone, split evenly.
            for (std::size_t i = 0; i < c; ++i) {
                u[i] = dist[i] == 0.0 ? 1.0 / static_cast<double>(coincident) : 0.0;
            }
        } else {
            for (std::size_t i = 0; i < c; ++i) {
                double denom = 0.0;
                for (std::size_t j = 0; j < c; ++j) {
                    denom += std::pow(dist[i] / dist[j], exponent);
                }
                u[i] = 1.0 / denom;
            }
        }
        for (std::size_t i = 0; i < c; ++i) {
            objective += std::pow(u[i], fuzzifier) * dist[i] * dist[i];
        }
    }
    return objective;
}

}  // namespace

FcmResult fcm_cluster(std::span<const double> points, const FcmParams& params) {
    check_fcm_params(params);
    if (points.empty()) throw InputError("cannot cluster an empty point set");
    for (double x : points) {
        if (!std::isfinite(x)) throw InputError("cluster input contains a non-finite value");
    }

    std::vector<double> unique(points.begin(), points.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    const auto c = static_cast<std::size_t>(params.clusters);
    if (unique.size() < c) {
        throw InputError("cannot place " + std::to_string(params.clusters) +
                         " clusters over " + std::to_string(unique.size()) +
                         " distinct values");
    }

    FcmResult result;
    result.centers.resize(c);
    for (std::size_t i = 0; i < c; ++i) {
        result.centers[i] =
            quantile(unique, (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(c)));
    }
    result.memberships.assign(points.size(), std::vector<double>(c, 0.0));

    for (int iter = 0; iter < params.max_iter; ++iter) {
        double objective =
            update_memberships(points, result.centers, params.fuzzifier, result.memberships);
        result.objective_history.push_back(objective);

        std::vector<double> next(c, 0.0);
        std::vector<double> weight(c, 0.0);
        for (std::size_t k = 0; k < points.size(); ++k) {
            for (std::size_t i = 0; i < c; ++i) {
                double w = std::pow(result.memberships[k][i], params.fuzzifier);
                next[i] += w * points[k];
                weight[i] += w;
            }
        }
        double shift = 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            if (weight[i] > 0.0) next[i] /= weight[i];
            else next[i] = result.centers[i];  // orphaned center stays put
            shift = std::max(shift, std::abs(next[i] - result.centers[i]));
        }
        result.centers = std::move(next);
        result.iterations = iter + 1;
        if (shift < params.tol) {
            result.converged = true;
            break;
        }
    }

    // Make the reported memberships consistent with the final centers,
    // then order everything by ascending center.
    update_memberships(points, result.centers, params.fuzzifier, result.memberships);
    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t lhs, std::size_t rhs) {
                  return result.centers[lhs] < result.centers[rhs];
              });
    std::vector<double> sorted_centers(c);
    for (std::size_t i = 0; i < c; ++i) sorted_centers[i] = result.centers[order[i]];
    result.centers = std::move(sorted_centers);
    for (auto& u : result.memberships) {
        std::vector<double> sorted_u(c);
        for (std::size_t i = 0; i < c; ++i) sorted_u[i] = u[order[i]];
        u = std::move(sorted_u);
    }
    return result;
}

namespace {

LinguisticVariable shoulder_partition(std::string name, double lo, double hi, double v_small,
                                      double v_medium, double v_large) {
    LinguisticVariable var;
    var.name = std::move(name);
    var.lo = lo;
    var.hi = hi;
    var.terms[static_cast<std::size_t>(Term::Small)] =
        make_triangle(v_small, v_small, v_medium);
    var.terms[static_cast<std::size_t>(Term::Medium)] =
        make_triangle(v_small, v_medium, v_large);
    var.terms[static_cast<std::size_t>(Term::Large)] =
        make_triangle(v_medium, v_large, v_large);
    return var;
}

}  // namespace

CalibratedVariable calibrate_variable(std::string name, std::span<const double> values,
                                      const FcmParams& params) {
    if (values.empty()) {
        throw InputError("cannot calibrate variable " + name + " from an empty series");
    }
    for (double x : values) {
        if (!std::isfinite(x)) {
            throw InputError("variable " + name + " series contains a non-finite value");
        }
    }

    auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    double lo_obs = *min_it;
    double hi_obs = *max_it;

    std::vector<double> unique(values.begin(), values.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    CalibratedVariable out;
    const auto need = static_cast<std::size_t>(params.clusters);
    if (values.size() >= need && unique.size() >= need) {
        FcmResult fcm = fcm_cluster(values, params);
        out.centers = {fcm.centers[0], fcm.centers[1], fcm.centers[2]};
        out.fallback = !(out.centers[0] < out.centers[1] && out.centers[1] < out.centers[2]);
    } else {
        out.fallback = true;
    }
    if (out.fallback) {
        // Uniform partition over the observed range; a constant series
        // is widened to a 0.1-wide band around its value first.
        if (lo_obs == hi_obs) {
            lo_obs -= 0.05;
            hi_obs += 0.05;
        }
        out.centers = {lo_obs, 0.5 * (lo_obs + hi_obs), hi_obs};
    }

    double pad = 0.05 * (hi_obs - lo_obs);
    out.variable = shoulder_partition(std::move(name), lo_obs - pad, hi_obs + pad, out.centers[0],
                                      out.centers[1], out.centers[2]);
    return out;
}

LinguisticVariable ds_variable() {
    LinguisticVariable var;
    var.name = "DS";
    var.lo = 0.0;
    var.hi = 1.0;
    var.terms[static_cast<std::size_t>(Term::Small)] = make_triangle(0.0, 0.0, 0.5);
    var.terms[static_cast<std::size_t>(Term::Medium)] = make_triangle(0.0, 0.5, 1.0);
    var.terms[static_cast<std::size_t>(Term::Large)] = make_triangle(0.5, 1.0, 1.0);
    return var;
}

CalibratedSystem make_system(CalibratedVariable arousal, CalibratedVariable valence,
                             CalibratedVariable dominance, RuleBase rules) {
    if (rules.empty()) throw InputError("rule base is empty");
    CalibratedSystem system;
    system.arousal = std::move(arousal.variable);
    system.valence = std::move(valence.variable);
    system.dominance = std::move(dominance.variable);
    system.output = ds_variable();
    system.rules = std::move(rules);
    return system;
}

namespace {

double input_value(const features::FeatureVector& x, VarId var) {
    switch (var) {
        case VarId::A: return x.arousal;
        case VarId::V: return x.valence;
        case VarId::D: return x.dominance;
    }
    return 0.0;
}

const LinguisticVariable& input_variable(const CalibratedSystem& system, VarId var) {
    switch (var) {
        case VarId::A: return system.arousal;
        case VarId::V: return system.valence;
        case VarId::D: return system.dominance;
    }
    return system.arousal;
}

AggregatedSet infer_from_strengths(const CalibratedSystem& system,
                                   const std::vector<double>& strengths) {
    AggregatedSet aggregate;
    aggregate.lo = system.output.lo;
    aggregate.hi = system.output.hi;
    aggregate.degrees.assign(kOutputSamples, 0.0);
    for (std::size_t r = 0; r < system.rules.size(); ++r) {
        if (strengths[r] <= 0.0) continue;
        const MembershipFunction& consequent =
            system.output.terms[static_cast<std::size_t>(system.rules[r].consequent)];
        for (std::size_t i = 0; i < kOutputSamples; ++i) {
            double x = aggregate.x_at(i);
            double clipped = std::min(strengths[r], consequent.degree(x));
            aggregate.degrees[i] = std::max(aggregate.degrees[i], clipped);
        }
    }
    return aggregate;
}

}  // namespace

std::vector<double> rule_strengths(const CalibratedSystem& system,
                                   const features::FeatureVector& x) {
    std::vector<double> strengths;
    strengths.reserve(system.rules.size());
    for (const FuzzyRule& rule : system.rules) {
        double strength = 1.0;
        for (const auto& [var, term] : rule.antecedent) {
            strength = std::min(strength, input_variable(system, var).degree(term, input_value(x, var)));
        }
        strengths.push_back(strength);
    }
    return strengths;
}

AggregatedSet infer(const CalibratedSystem& system, const features::FeatureVector& x) {
    return infer_from_strengths(system, rule_strengths(system, x));
}

Defuzzified defuzzify(const AggregatedSet& aggregate) {
    constexpr double kEmptyThreshold = 1e-12;
    const std::size_t n = aggregate.degrees.size();
    if (n < 2) throw InputError("aggregate needs at least two samples");
    double weighted = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;  // trapezoid endpoint weights
        double mu = w * aggregate.degrees[i];
        weighted += mu * aggregate.x_at(i);
        mass += mu;
    }
    if (mass < kEmptyThreshold) return {0.5, true};
    return {weighted / mass, false};
}

Classification classify(const CalibratedSystem& system, const features::FeatureVector& x) {
    Classification result;
    result.rule_strengths = rule_strengths(system, x);
    Defuzzified out = defuzzify(infer_from_strengths(system, result.rule_strengths));
    result.ds = out.value;
    result.indeterminate = out.indeterminate;
    return result;
}

}  // namespace vigil::fuzzy
