#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <set>

#include "hotspots/cli.hpp"
#include "hotspots/errors.hpp"

namespace hotspots {

namespace {

using Clock = std::chrono::steady_clock;

struct Context {
    const RunConfig& config;
    ArtifactBundle bundle;
    std::ostream& log;
};

ConvexDomain config_domain(const RunConfig& c) {
    ConvexDomain d = domain_from_json(c.domain, "domain");
    return c.normalize ? normalize(d).first : d;
}

double inradius_of(const ConvexDomain& d) { return inradius_incenter(d).radius; }

Json point_json(Vec2 p) { return Json{p.x, p.y}; }

Json common_json(const RunConfig& c, const ConvexDomain& d) {
    return {{"command", to_string(c.command)}, {"domain", domain_to_json(d)}, {"domain_label", domain_label(d)},
            {"normalized", c.normalize}, {"seed", c.seed}};
}

struct Solved {
    TriMesh mesh;
    EigenPair pair;
};

EigenOptions eigen_options(const RunConfig& c) {
    EigenOptions o;
    o.max_iterations = c.eigen_max_iterations.value_or(o.max_iterations);
    return o;
}

Solved solve_on(const ConvexDomain& d, const RunConfig& c) {
    TriMesh mesh = triangulate(d, c.h.value_or(0.1 * inradius_of(d)));
    EigenPair pair = solve_first_eigenpair(mesh, eigen_options(c));
    return {std::move(mesh), std::move(pair)};
}

void dump_solution(Context& ctx, const Solved& s) {
    if (ctx.config.dump_mesh) {
        CsvTable nodes({"node", "x", "y", "boundary"});
        for (std::size_t i = 0; i < s.mesh.node_count(); ++i)
            nodes.add_row({static_cast<double>(i), s.mesh.nodes()[i].x, s.mesh.nodes()[i].y,
                           static_cast<double>(s.mesh.boundary_node_flags()[i])});
        CsvTable tris({"triangle", "a", "b", "c"});
        for (std::size_t i = 0; i < s.mesh.triangle_count(); ++i) {
            const auto& t = s.mesh.triangles()[i];
            tris.add_row({static_cast<double>(i), static_cast<double>(t[0]), static_cast<double>(t[1]), static_cast<double>(t[2])});
        }
        ctx.bundle.add("mesh_nodes.csv", nodes.str());
        ctx.bundle.add("mesh_triangles.csv", tris.str());
    }
    if (ctx.config.dump_eigenfunction) {
        CsvTable phi({"node", "x", "y", "phi"});
        for (std::size_t i = 0; i < s.mesh.node_count(); ++i)
            phi.add_row({static_cast<double>(i), s.mesh.nodes()[i].x, s.mesh.nodes()[i].y, s.pair.phi[static_cast<Eigen::Index>(i)]});
        ctx.bundle.add("eigenfunction.csv", phi.str());
    }
}

Json eigen_json(const Solved& s) {
    return {{"mu1", s.pair.mu1},
            {"mu2", s.pair.mu2},
            {"multiplicity_flag", s.pair.multiplicity_flag},
            {"residual", s.pair.residual},
            {"iterations", s.pair.iterations},
            {"nodes", s.mesh.node_count()},
            {"triangles", s.mesh.triangle_count()},
            {"h", s.mesh.target_h()}};
}

int run_solve(Context& ctx) {
    const auto t0 = Clock::now();
    const ConvexDomain d = config_domain(ctx.config);
    const Solved s = solve_on(d, ctx.config);
    Json j = common_json(ctx.config, d);
    j.update(eigen_json(s));
    j["runtime_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
    ctx.bundle.add_json("solve.json", j);
    dump_solution(ctx, s);
    ctx.log << "mu1 = " << format_number(s.pair.mu1) << (s.pair.multiplicity_flag ? " (near-multiple)" : "") << "\n";
    return kExitPass;
}

int run_hotspots(Context& ctx) {
    const ConvexDomain d = config_domain(ctx.config);
    const Solved s = solve_on(d, ctx.config);
    const HotSpotSet hs = hot_spots(s.pair, s.mesh, ctx.config.band_epsilon.value_or(1e-3));
    const NodalLineReport nl = nodal_line_report(s.pair, s.mesh);
    const DiameterPairSet pairs = all_diameter_pairs(d, 1e-9);

    CsvTable table({"set", "x", "y", "value", "node"});
    Json sets = Json::object();
    const std::pair<const char*, const std::vector<ExtremalPoint>*> named[] = {
        {"max", &hs.maxima}, {"min", &hs.minima}, {"max_band", &hs.max_band}, {"min_band", &hs.min_band}};
    for (const auto& [name, list] : named) {
        Json arr = Json::array();
        for (const ExtremalPoint& e : *list) {
            table.add_text_row({name, format_number(e.point.x), format_number(e.point.y), format_number(e.value), std::to_string(e.node)});
            arr.push_back({{"point", point_json(e.point)}, {"value", e.value}, {"node", e.node}});
        }
        if (std::string(name) == "max" || std::string(name) == "min") sets[name] = arr;
        else sets[std::string(name) + "_size"] = list->size();
    }
    Json diam = Json::array();
    for (const DiameterPair& p : pairs.pairs) diam.push_back({{"a", point_json(p.a)}, {"b", point_json(p.b)}, {"length", p.length}});

    Json j = common_json(ctx.config, d);
    j.update(eigen_json(s));
    j["hot_spots"] = sets;
    j["band_epsilon"] = hs.band_epsilon;
    j["diameter_pairs"] = diam;
    j["nodal_line"] = {{"x_projection_width", nl.x_projection_width},
                       {"distance_to_max_fiber", nl.distance_to_max_fiber},
                       {"degenerate", nl.degenerate},
                       {"segments", nl.crossing_segments.size()}};
    ctx.bundle.add_json("hotspots.json", j);
    ctx.bundle.add("hotspots.csv", table.str());
    dump_solution(ctx, s);
    ctx.log << "max at (" << format_number(hs.maxima.front().point.x) << ", " << format_number(hs.maxima.front().point.y)
            << "), min at (" << format_number(hs.minima.front().point.x) << ", " << format_number(hs.minima.front().point.y) << ")\n";
    return kExitPass;
}

double default_dt(const ConvexDomain& d, double t) {
    const double r = inradius_of(d);
    return std::min(1e-3 * r * r, t / 100.0);
}

CsvTable endpoint_table(const PathEnsemble& e) {
    CsvTable t({"path", "x", "y"});
    for (std::size_t i = 0; i < e.endpoints.size(); ++i) t.add_row({static_cast<double>(i), e.endpoints[i].x, e.endpoints[i].y});
    return t;
}

int run_simulate(Context& ctx) {
    const RunConfig& c = ctx.config;
    const ConvexDomain d = config_domain(c);
    const Vec2 start = c.start.value_or(inradius_incenter(d).center);
    const double t = c.t.value_or(1.0);
    const PathEnsemble e = simulate(d, start, t, c.dt.value_or(default_dt(d, t)), c.n_paths.value_or(10000), c.seed, c.backend);
    Vec2 mean{0.0, 0.0};
    for (const Vec2& p : e.endpoints) mean = mean + p;
    mean = mean / static_cast<double>(e.endpoints.size());
    Json j = common_json(c, d);
    j.update({{"start", point_json(start)}, {"t", e.t_final}, {"dt", e.dt}, {"n_paths", e.n_paths}, {"mean_endpoint", point_json(mean)}});
    ctx.bundle.add_json("simulate.json", j);
    ctx.bundle.add("endpoints.csv", endpoint_table(e).str());
    ctx.log << e.n_paths << " paths to t = " << format_number(e.t_final) << "\n";
    return kExitPass;
}

int run_feynman_kac(Context& ctx) {
    const RunConfig& c = ctx.config;
    const ConvexDomain d = config_domain(c);
    const Solved s = solve_on(d, c);
    const Vec2 start = c.start.value_or(hot_spots(s.pair, s.mesh).maxima.front().point);
    const FeynmanKacReport r =
        feynman_kac_check(d, s.pair, s.mesh, start, c.t.value_or(1.0), c.n_paths.value_or(100000), c.seed, c.dt.value_or(1e-4), c.backend);
    Json j = common_json(c, d);
    j.update(eigen_json(s));
    j.update({{"start", point_json(start)},
              {"t", r.t},
              {"dt", r.dt},
              {"n_paths", r.n_paths},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"standard_error", r.standard_error},
              {"z_score", r.z_score},
              {"relative_error", r.relative_error},
              {"error_budget", r.error_budget},
              {"within_3_sigma", r.within_3_sigma},
              {"pass", r.pass}});
    ctx.bundle.add_json("feynman_kac.json", j);
    ctx.log << (r.pass ? "PASS" : "FAIL") << " feynman-kac lhs " << format_number(r.lhs) << " rhs " << format_number(r.rhs) << " z "
            << format_number(r.z_score) << "\n";
    return r.pass ? kExitPass : kExitVerificationFailed;
}

int run_heat_kernel(Context& ctx) {
    const RunConfig& c = ctx.config;
    const ConvexDomain d = config_domain(c);
    const Vec2 source = c.start.value_or(inradius_incenter(d).center);
    const double t = c.t.value_or(1.0);
    const TriMesh bins = triangulate(d, c.h.value_or(0.25 * inradius_of(d)));
    const PathEnsemble e = simulate(d, source, t, c.dt.value_or(default_dt(d, t)), c.n_paths.value_or(100000), c.seed, c.backend);
    const HeatKernelEstimate k = bin_endpoints(bins, e);
    CsvTable table({"cell", "cx", "cy", "area", "count", "density"});
    for (std::size_t i = 0; i < k.counts.size(); ++i)
        table.add_row({static_cast<double>(i), k.cell_centers[i].x, k.cell_centers[i].y, k.cell_areas[i], static_cast<double>(k.counts[i]),
                       k.density[i]});
    Json j = common_json(c, d);
    j.update({{"source", point_json(source)}, {"t", e.t_final}, {"dt", e.dt}, {"n_paths", e.n_paths}, {"cells", k.counts.size()}});
    ctx.bundle.add_json("heat_kernel.json", j);
    ctx.bundle.add("heat_kernel.csv", table.str());
    if (c.dump_endpoints) ctx.bundle.add("endpoints.csv", endpoint_table(e).str());
    ctx.log << k.counts.size() << " cells, " << e.n_paths << " paths\n";
    return kExitPass;
}

// One verification on one domain with the run's options.
VerificationReport verify_one(const RunConfig& c, LemmaId lemma, const ConvexDomain& d, std::uint64_t seed) {
    VerificationReport r;
    switch (lemma) {
        case LemmaId::main_theorem: {
            MainTheoremOptions o;
            o.eigen = eigen_options(c);
            o.h = c.h.value_or(o.h);
            o.band_epsilon = c.band_epsilon.value_or(o.band_epsilon);
            o.c_max = c.c_max.value_or(o.c_max);
            r = verify_main_theorem(d, o);
            break;
        }
        case LemmaId::lemma1: r = verify_lemma1(d, c.c_max.value_or(10.0)); break;
        case LemmaId::lemma2: r = verify_volume_comparability(d, c.delta.value_or(0.25), c.n_paths.value_or(100), seed); break;
        case LemmaId::lemma3: {
            const ConvexDomain nd = normalize(d).first;
            const TriMesh bins = triangulate(nd, c.h.value_or(0.25));
            const Vec2 x = c.start.value_or(inradius_incenter(nd).center);
            r = verify_lemma3(nd, bins, x, c.target.value_or(x), c.delta.value_or(0.25), c.n_paths.value_or(50000), seed,
                              c.dt.value_or(1e-4), c.backend);
            break;
        }
        case LemmaId::lemma4: {
            Lemma4Options o;
            o.eigen = eigen_options(c);
            o.h = c.h.value_or(o.h);
            o.c_max = c.c_max.value_or(o.c_max);
            r = verify_lemma4(d, o);
            break;
        }
        case LemmaId::theorem1_bounds: {
            const ConvexDomain nd = normalize(d).first;
            const TriMesh bins = triangulate(nd, c.h.value_or(0.25));
            std::vector<Vec2> sources = c.sources;
            if (sources.empty()) {
                const Vec2 center = inradius_incenter(nd).center;
                Vec2 left = nd.vertex(0);
                for (const Vec2& v : nd.vertices())
                    if (v.x < left.x) left = v;
                sources = {center, center + (left - center) * 0.5};
            }
            const std::vector<double> times = c.times.empty() ? std::vector<double>{0.5, 2.0} : c.times;
            GaussianFitOptions o;
            o.n_paths = c.n_paths.value_or(o.n_paths);
            o.dt = c.dt.value_or(0.0);
            o.backend = c.backend;
            r = verify_gaussian_bounds(nd, bins, sources, times, seed, o);
            break;
        }
        case LemmaId::nodal_width: {
            NodalWidthOptions o;
            o.eigen = eigen_options(c);
            o.h = c.h.value_or(o.h);
            r = verify_nodal_width(d, o);
            break;
        }
        case LemmaId::hitting_time: {
            HittingTimeOptions o;
            o.eigen = eigen_options(c);
            o.h = c.h.value_or(o.h);
            o.offset_c2 = c.offset.value_or(o.offset_c2);
            o.t_budget = c.t_budget.value_or(o.t_budget);
            o.n_paths = c.n_paths.value_or(o.n_paths);
            o.dt = c.dt.value_or(o.dt);
            o.backend = c.backend;
            r = verify_hitting_time(d, seed, o);
            break;
        }
        case LemmaId::stationarity: {
            StationarityOptions o;
            o.n_paths = c.n_paths.value_or(o.n_paths);
            o.backend = c.backend;
            r = verify_stationarity(d, seed, o);
            break;
        }
        case LemmaId::eigenvalue_scaling: throw ConfigError("family", "eigenvalue_scaling runs on a family");
    }
    r.seed = seed;
    return r;
}

void add_reports(Context& ctx, const std::vector<VerificationReport>& reports, bool wide_table) {
    Json arr = Json::array();
    CsvTable long_form({"member", "domain", "constant", "value"});
    std::set<std::string> keys;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        arr.push_back(report_to_json(reports[i]));
        for (const auto& [k, v] : reports[i].fitted_constants) {
            long_form.add_text_row({std::to_string(i), "\"" + reports[i].domain_label + "\"", k, format_number(v)});
            keys.insert(k);
        }
        ctx.log << (reports[i].pass ? "PASS " : "FAIL ") << to_string(reports[i].lemma) << " " << reports[i].domain_label << "\n";
    }
    ctx.bundle.add_json("reports.json", arr);
    ctx.bundle.add("constants.csv", long_form.str());
    if (!wide_table) return;
    std::vector<std::string> header = {"member", "domain", "pass"};
    header.insert(header.end(), keys.begin(), keys.end());
    CsvTable wide(header);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        std::vector<std::string> row = {std::to_string(i), "\"" + reports[i].domain_label + "\"", reports[i].pass ? "1" : "0"};
        for (const std::string& k : keys) {
            const auto it = reports[i].fitted_constants.find(k);
            row.push_back(it == reports[i].fitted_constants.end() ? "" : format_number(it->second));
        }
        wide.add_text_row(row);
    }
    ctx.bundle.add("sweep.csv", wide.str());
}

int run_verify(Context& ctx, bool sweep) {
    const RunConfig& c = ctx.config;
    const LemmaId lemma = *c.lemma;
    std::vector<VerificationReport> reports;
    if (lemma == LemmaId::eigenvalue_scaling) {
        EigenvalueScalingOptions o;
        o.eigen = eigen_options(c);
        o.h = c.h.value_or(o.h);
        o.c_max = c.c_max.value_or(o.c_max);
        reports.push_back(eigenvalue_scaling(domain_family(family_from_json(c.family), c.seed), o));
        reports.back().seed = c.seed;
    } else if (!c.family.is_null()) {
        std::vector<ConvexDomain> members = domain_family(family_from_json(c.family), c.seed);
        if (c.normalize)
            for (ConvexDomain& m : members) m = normalize(m).first;
        const auto one = [&](const ConvexDomain& m) {
            const auto i = static_cast<std::uint64_t>(&m - members.data());
            return verify_one(c, lemma, m, path_seed(c.seed, i));
        };
        reports = run_over_family(members, one, c.backend);
    } else {
        reports.push_back(verify_one(c, lemma, config_domain(c), c.seed));
    }
    add_reports(ctx, reports, sweep);
    const bool all = std::all_of(reports.begin(), reports.end(), [](const VerificationReport& r) { return r.pass; });
    return all ? kExitPass : kExitVerificationFailed;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
    Context ctx{config, {}, log};
    int status = kExitPass;
    switch (config.command) {
        case Command::solve: status = run_solve(ctx); break;
        case Command::hotspots: status = run_hotspots(ctx); break;
        case Command::simulate: status = run_simulate(ctx); break;
        case Command::feynman_kac: status = run_feynman_kac(ctx); break;
        case Command::heat_kernel: status = run_heat_kernel(ctx); break;
        case Command::verify: status = run_verify(ctx, false); break;
        case Command::sweep: status = run_verify(ctx, true); break;
    }
    ctx.bundle.write(config.output, to_json(config));
    log << "wrote " << ctx.bundle.files().size() + 1 << " files to " << config.output << "\n";
    return status;
}

}  // namespace hotspots
