#include <cmath>
#include <exception>
#include <random>
#include <sstream>

#include "hotspots/errors.hpp"
#include "hotspots/experiments.hpp"

#ifdef HOTSPOTS_HAVE_OPENMP
#include <omp.h>
#endif

namespace hotspots {

namespace {

constexpr LemmaId kLemmas[] = {LemmaId::main_theorem, LemmaId::lemma1,         LemmaId::lemma2,
                               LemmaId::lemma3,       LemmaId::lemma4,         LemmaId::theorem1_bounds,
                               LemmaId::eigenvalue_scaling, LemmaId::nodal_width, LemmaId::hitting_time,
                               LemmaId::stationarity};

constexpr CheckOp kOps[] = {CheckOp::le, CheckOp::lt, CheckOp::ge, CheckOp::gt, CheckOp::within_rel, CheckOp::finite};

constexpr FamilyKind kFamilies[] = {FamilyKind::rectangles, FamilyKind::ellipses, FamilyKind::stadiums,
                                    FamilyKind::random_hulls, FamilyKind::triangles};

}  // namespace

std::string to_string(LemmaId id) {
    switch (id) {
        case LemmaId::main_theorem: return "main_theorem";
        case LemmaId::lemma1: return "lemma1";
        case LemmaId::lemma2: return "lemma2";
        case LemmaId::lemma3: return "lemma3";
        case LemmaId::lemma4: return "lemma4";
        case LemmaId::theorem1_bounds: return "theorem1_bounds";
        case LemmaId::eigenvalue_scaling: return "eigenvalue_scaling";
        case LemmaId::nodal_width: return "nodal_width";
        case LemmaId::hitting_time: return "hitting_time";
        case LemmaId::stationarity: return "stationarity";
    }
    return "main_theorem";
}

LemmaId lemma_id_from_string(const std::string& name) {
    for (LemmaId id : kLemmas)
        if (to_string(id) == name) return id;
    throw InputError("unknown lemma '" + name + "'");
}

std::string to_string(CheckOp op) {
    switch (op) {
        case CheckOp::le: return "le";
        case CheckOp::lt: return "lt";
        case CheckOp::ge: return "ge";
        case CheckOp::gt: return "gt";
        case CheckOp::within_rel: return "within_rel";
        case CheckOp::finite: return "finite";
    }
    return "le";
}

CheckOp check_op_from_string(const std::string& name) {
    for (CheckOp op : kOps)
        if (to_string(op) == name) return op;
    throw InputError("unknown check operator '" + name + "'");
}

bool check_holds(const Check& check, const std::map<std::string, double>& constants) {
    const auto it = constants.find(check.constant);
    if (it == constants.end()) return false;
    const double v = it->second;
    if (std::isnan(v)) return false;
    switch (check.op) {
        case CheckOp::le: return v <= check.bound;
        case CheckOp::lt: return v < check.bound;
        case CheckOp::ge: return v >= check.bound;
        case CheckOp::gt: return v > check.bound;
        case CheckOp::within_rel: return std::abs(v - check.target) <= check.bound * std::abs(check.target);
        case CheckOp::finite: return std::isfinite(v);
    }
    return false;
}

bool evaluate_pass(const VerificationReport& report) {
    if (report.tolerances.empty()) return false;
    for (const Check& c : report.tolerances)
        if (!check_holds(c, report.fitted_constants)) return false;
    return true;
}

std::string domain_label(const ConvexDomain& d) {
    const Provenance& p = d.provenance();
    std::ostringstream out;
    out << to_string(p.kind) << '(';
    bool first = true;
    const auto field = [&](const std::string& key, const auto& value) {
        out << (first ? "" : ",") << key << '=' << value;
        first = false;
    };
    for (const auto& [k, v] : p.parameters) field(k, v);
    if (p.polygonalization_k > 0) field("k", p.polygonalization_k);
    if (p.kind == DomainKind::random_hull) field("seed", p.seed);
    if (p.kind == DomainKind::polygon) field("n", d.size());
    out << ')';
    return out.str();
}

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::rectangles: return "rectangles";
        case FamilyKind::ellipses: return "ellipses";
        case FamilyKind::stadiums: return "stadiums";
        case FamilyKind::random_hulls: return "random_hulls";
        case FamilyKind::triangles: return "triangles";
    }
    return "rectangles";
}

FamilyKind family_kind_from_string(const std::string& name) {
    for (FamilyKind k : kFamilies)
        if (to_string(k) == name) return k;
    throw InputError("unknown family '" + name + "'");
}

std::vector<ConvexDomain> domain_family(const FamilyConfig& c, std::uint64_t seed) {
    std::vector<ConvexDomain> out;
    const auto need_parameters = [&] {
        if (c.parameters.empty()) throw InputError(to_string(c.kind) + " family needs a non-empty parameter list");
        for (double v : c.parameters)
            if (!(v >= 1.0) || !std::isfinite(v)) throw InputError(to_string(c.kind) + " parameters must be finite and >= 1");
    };
    const auto need_random = [&] {
        if (c.count < 1) throw InputError(to_string(c.kind) + " family needs count >= 1");
        if (!(c.length_min >= 1.0 && c.length_max >= c.length_min && std::isfinite(c.length_max)))
            throw InputError(to_string(c.kind) + " family needs 1 <= length_min <= length_max");
    };
    switch (c.kind) {
        case FamilyKind::rectangles:
            need_parameters();
            for (double n : c.parameters) out.push_back(make_rectangle(n, 1.0));
            break;
        case FamilyKind::ellipses:
            need_parameters();
            for (double a : c.parameters) out.push_back(make_ellipse(a, 1.0, c.polygonalization_k));
            break;
        case FamilyKind::stadiums:
            need_parameters();
            for (double a : c.parameters) {
                if (!(a > 1.0)) throw InputError("stadium aspect must exceed 1");
                out.push_back(make_stadium(2.0 * (a - 1.0), 1.0, c.polygonalization_k));
            }
            break;
        case FamilyKind::random_hulls:
            need_random();
            if (c.points < 3) throw InputError("random hulls need at least 3 points");
            for (int i = 0; i < c.count; ++i) {
                const std::uint64_t s = path_seed(seed, static_cast<std::uint64_t>(i));
                std::mt19937_64 rng(s);
                const double m = std::uniform_real_distribution<double>(c.length_min, c.length_max)(rng);
                out.push_back(make_random_hull(c.points, m, 1.0, s));
            }
            break;
        case FamilyKind::triangles:
            need_random();
            for (int i = 0; i < c.count; ++i) {
                std::mt19937_64 rng(path_seed(seed, static_cast<std::uint64_t>(i)));
                const double m = std::uniform_real_distribution<double>(c.length_min, c.length_max)(rng);
                const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                out.push_back(make_triangle({0.0, 0.0}, {m, 0.0}, {u * m, 1.0}));
            }
            break;
    }
    return out;
}

std::vector<VerificationReport> run_over_family(const std::vector<ConvexDomain>& family,
                                                const std::function<VerificationReport(const ConvexDomain&)>& fn,
                                                Backend backend) {
    std::vector<VerificationReport> out(family.size());
    std::vector<std::exception_ptr> errors(family.size());
    const auto one = [&](std::size_t i) {
        try {
            out[i] = fn(family[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
#ifdef HOTSPOTS_HAVE_OPENMP
    if (backend == Backend::openmp) {
        const auto n = static_cast<std::int64_t>(family.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
        for (std::int64_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < family.size(); ++i) one(i);
    }
#else
    (void)backend;
    for (std::size_t i = 0; i < family.size(); ++i) one(i);
#endif
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace hotspots
