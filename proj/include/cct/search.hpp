#pragma once

#include "cct/conformal.hpp"
#include "cct/patch.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cct {

// One flatten evaluation inside the search.
struct SearchEvaluation {
    double c = 0.0;
    SideLengths sides;
    double mismatch = 0.0;
    int flatten_iterations = 0;
    double residual = 0.0;
};

struct BracketStep {
    double c_low = 0.0, c_high = 0.0;
    double m_low = 0.0, m_high = 0.0;
};

struct SearchReport {
    double c_star = 0.0;
    std::vector<BracketStep> bracket_history;
    std::vector<SearchEvaluation> evaluations;
    double resolution = 0.0;   // target edge length used
    double c_tolerance = 0.0;
    int flatten_calls = 0;
};

namespace search_detail {

inline SearchEvaluation evaluate_mismatch(double c, double resolution) {
    SearchEvaluation ev;
    ev.c = c;
    try {
        const PatchMesh patch = mesh_patch(c, resolution);
        const FlattenedPatch flat = flatten(patch);
        ev.sides = side_lengths(patch, flat);
        ev.mismatch = mismatch(ev.sides);
        ev.flatten_iterations = flat.iterations;
        ev.residual = flat.residual;
    } catch (const Error& e) {
        throw Error("mismatch evaluation failed at c = " + std::to_string(c) + ": " +
                    e.what());
    }
    return ev;
}

} // namespace search_detail

// Bisection for the conformally correct contour parameter: the c where the
// flattened quad's top side equals the two vertical sides combined.
inline SearchReport solve_cstar(double bracket_low = -0.5, double bracket_high = 0.0,
                                double c_tol = 5e-4, double resolution = 0.02) {
    if (!(bracket_low < bracket_high) || bracket_low <= -1.0 || bracket_high >= 1.0)
        throw Error("solve_cstar: bracket must satisfy -1 < low < high < 1");
    SearchReport report;
    report.resolution = resolution;
    report.c_tolerance = c_tol;

    SearchEvaluation lo = search_detail::evaluate_mismatch(bracket_low, resolution);
    SearchEvaluation hi = search_detail::evaluate_mismatch(bracket_high, resolution);
    report.evaluations.push_back(lo);
    report.evaluations.push_back(hi);
    report.flatten_calls = 2;
    if (!(lo.mismatch < 0.0 && hi.mismatch > 0.0))
        throw Error("solve_cstar: mismatch does not change sign over the bracket "
                    "(m(" + std::to_string(bracket_low) + ") = " + std::to_string(lo.mismatch) +
                    ", m(" + std::to_string(bracket_high) + ") = " + std::to_string(hi.mismatch) + ")");

    double c_lo = bracket_low, c_hi = bracket_high;
    double m_lo = lo.mismatch, m_hi = hi.mismatch;
    report.bracket_history.push_back({c_lo, c_hi, m_lo, m_hi});
    while (0.5 * (c_hi - c_lo) > c_tol) {
        const double mid = 0.5 * (c_lo + c_hi);
        const SearchEvaluation ev = search_detail::evaluate_mismatch(mid, resolution);
        report.evaluations.push_back(ev);
        ++report.flatten_calls;
        if (ev.mismatch < 0.0) { c_lo = mid; m_lo = ev.mismatch; }
        else { c_hi = mid; m_hi = ev.mismatch; }
        report.bracket_history.push_back({c_lo, c_hi, m_lo, m_hi});
    }
    report.c_star = 0.5 * (c_lo + c_hi);
    return report;
}

// Sampled mismatch diagnostic; per-point failures are recorded, not fatal.
struct MismatchSample {
    double c = 0.0;
    std::optional<double> mismatch;
    std::optional<SideLengths> sides;
    std::string error;
};

inline std::vector<MismatchSample> mismatch_curve(const std::vector<double>& cs,
                                                  double resolution = 0.02) {
    std::vector<MismatchSample> out;
    out.reserve(cs.size());
    for (const double c : cs) {
        MismatchSample s;
        s.c = c;
        try {
            const SearchEvaluation ev = search_detail::evaluate_mismatch(c, resolution);
            s.mismatch = ev.mismatch;
            s.sides = ev.sides;
        } catch (const Error& e) {
            s.error = e.what();
        }
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace cct
