#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "hotspots/cli.hpp"
#include "hotspots/errors.hpp"

namespace hotspots {

namespace {

constexpr Command kCommands[] = {Command::solve,       Command::hotspots, Command::simulate, Command::feynman_kac,
                                 Command::heat_kernel, Command::verify,   Command::sweep};

std::optional<double> opt_number(const Json& j, const std::string& key, double lo, double hi, bool lo_open) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    const Json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(key, "must be a number");
    const double x = v.get<double>();
    const bool low_ok = lo_open ? x > lo : x >= lo;
    if (!std::isfinite(x) || !low_ok || x > hi) {
        std::ostringstream msg;
        msg << "must lie in " << (lo_open ? "(" : "[") << lo << ", " << hi << "], got " << x;
        throw ConfigError(key, msg.str());
    }
    return x;
}

std::optional<double> opt_positive(const Json& j, const std::string& key) { return opt_number(j, key, 0.0, 1e12, true); }

Vec2 point_of(const Json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(field, "must be an [x, y] pair of numbers");
    const Vec2 p{v[0].get<double>(), v[1].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ConfigError(field, "must be finite");
    return p;
}

bool opt_bool(const Json& j, const std::string& key) {
    if (!j.contains(key) || j.at(key).is_null()) return false;
    if (!j.at(key).is_boolean()) throw ConfigError(key, "must be true or false");
    return j.at(key).get<bool>();
}

Json point_json(const std::optional<Vec2>& p) { return p ? Json{p->x, p->y} : Json(nullptr); }

// "x,y;x,y" -> [[x, y], ...]
Json parse_point_list(const std::string& text, const std::string& field) {
    Json out = Json::array();
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ';')) {
        std::stringstream one(item);
        std::string a, b, extra;
        if (!std::getline(one, a, ',') || !std::getline(one, b, ',') || std::getline(one, extra, ','))
            throw ConfigError(field, "expected 'x,y' pairs separated by ';'");
        try {
            out.push_back({std::stod(a), std::stod(b)});
        } catch (const std::exception&) {
            throw ConfigError(field, "'" + item + "' is not a pair of numbers");
        }
    }
    return out;
}

Json domain_from_flags(const std::string& kind, const std::optional<double>& n, int k, int points, const std::string& vertices,
                       std::uint64_t seed) {
    const auto need_n = [&] {
        if (!n) throw ConfigError("N", "required for --domain " + kind);
        return *n;
    };
    if (kind == "rectangle") return {{"kind", kind}, {"length", need_n()}, {"height", 1.0}};
    if (kind == "ellipse") return {{"kind", kind}, {"semi_major", need_n()}, {"semi_minor", 1.0}, {"k", k}};
    if (kind == "disk") return {{"kind", kind}, {"radius", n.value_or(1.0)}, {"k", k}};
    if (kind == "stadium") {
        const double a = need_n();
        if (!(a > 1.0)) throw ConfigError("N", "stadium aspect must exceed 1");
        return {{"kind", kind}, {"straight_length", 2.0 * (a - 1.0)}, {"radius", 1.0}, {"k", k}};
    }
    if (kind == "random_hull") return {{"kind", kind}, {"points", points}, {"length", need_n()}, {"height", 1.0}, {"seed", seed}};
    if (kind == "triangle" || kind == "polygon") {
        if (vertices.empty()) throw ConfigError("vertices", "required for --domain " + kind);
        return {{"kind", kind}, {"vertices", parse_point_list(vertices, "vertices")}};
    }
    throw ConfigError("domain", "unknown domain kind '" + kind + "'");
}

}  // namespace

std::string to_string(Command c) {
    switch (c) {
        case Command::solve: return "solve";
        case Command::hotspots: return "hotspots";
        case Command::simulate: return "simulate";
        case Command::feynman_kac: return "feynman-kac";
        case Command::heat_kernel: return "heat-kernel";
        case Command::verify: return "verify";
        case Command::sweep: return "sweep";
    }
    return "solve";
}

Command command_from_string(const std::string& name) {
    for (Command c : kCommands)
        if (to_string(c) == name) return c;
    throw ConfigError("command", "unknown command '" + name + "'");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "backend", "band_epsilon", "c_max", "command", "delta", "domain", "dt", "dump_eigenfunction",
        "dump_endpoints", "dump_mesh", "eigen_max_iterations", "family", "h", "lemma", "n_paths", "normalize", "offset",
        "output", "seed", "sources", "start", "t", "t_budget", "target", "times"};
    return keys;
}

RunConfig parse_run_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
    const std::set<std::string> known(config_keys().begin(), config_keys().end());
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError(key, "unknown key");

    RunConfig c;
    if (!j.contains("command") || !j.at("command").is_string()) throw ConfigError("command", "required string");
    c.command = command_from_string(j.at("command").get<std::string>());

    if (j.contains("lemma") && !j.at("lemma").is_null()) {
        if (!j.at("lemma").is_string()) throw ConfigError("lemma", "must be a string");
        try {
            c.lemma = lemma_id_from_string(j.at("lemma").get<std::string>());
        } catch (const InputError& e) {
            throw ConfigError("lemma", e.what());
        }
    }

    if (j.contains("seed") && !j.at("seed").is_null()) {
        const Json& s = j.at("seed");
        if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
            throw ConfigError("seed", "must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }

    if (j.contains("domain") && !j.at("domain").is_null()) {
        c.domain = j.at("domain");
        (void)domain_from_json(c.domain, "domain");
    }
    if (j.contains("family") && !j.at("family").is_null()) {
        c.family = j.at("family");
        const FamilyConfig fc = family_from_json(c.family, "family");
        try {
            (void)domain_family(fc, c.seed);
        } catch (const InputError& e) {
            throw ConfigError("family", e.what());
        }
    }

    c.h = opt_positive(j, "h");
    c.dt = opt_positive(j, "dt");
    c.t = opt_positive(j, "t");
    c.delta = opt_number(j, "delta", 0.0, 1.0, true);
    c.band_epsilon = opt_number(j, "band_epsilon", 0.0, 0.5, true);
    c.c_max = opt_positive(j, "c_max");
    c.offset = opt_positive(j, "offset");
    c.t_budget = opt_positive(j, "t_budget");
    if (j.contains("n_paths") && !j.at("n_paths").is_null()) {
        const Json& v = j.at("n_paths");
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1 || v.get<std::int64_t>() > 1'000'000'000)
            throw ConfigError("n_paths", "must be an integer in [1, 1e9]");
        c.n_paths = v.get<std::size_t>();
    }
    if (j.contains("eigen_max_iterations") && !j.at("eigen_max_iterations").is_null()) {
        const Json& v = j.at("eigen_max_iterations");
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1 || v.get<std::int64_t>() > 100000)
            throw ConfigError("eigen_max_iterations", "must be an integer in [1, 100000]");
        c.eigen_max_iterations = v.get<int>();
    }
    if (j.contains("start") && !j.at("start").is_null()) c.start = point_of(j.at("start"), "start");
    if (j.contains("target") && !j.at("target").is_null()) c.target = point_of(j.at("target"), "target");
    if (j.contains("sources") && !j.at("sources").is_null()) {
        if (!j.at("sources").is_array()) throw ConfigError("sources", "must be an array of [x, y] pairs");
        for (const Json& p : j.at("sources")) c.sources.push_back(point_of(p, "sources"));
    }
    if (j.contains("times") && !j.at("times").is_null()) {
        if (!j.at("times").is_array()) throw ConfigError("times", "must be an array of positive numbers");
        for (const Json& v : j.at("times")) {
            if (!v.is_number() || !(v.get<double>() > 0.0) || !std::isfinite(v.get<double>()))
                throw ConfigError("times", "must be an array of positive numbers");
            c.times.push_back(v.get<double>());
        }
    }
    c.normalize = opt_bool(j, "normalize");
    c.dump_mesh = opt_bool(j, "dump_mesh");
    c.dump_eigenfunction = opt_bool(j, "dump_eigenfunction");
    c.dump_endpoints = opt_bool(j, "dump_endpoints");
    if (j.contains("output") && !j.at("output").is_null()) {
        if (!j.at("output").is_string() || j.at("output").get<std::string>().empty())
            throw ConfigError("output", "must be a non-empty path");
        c.output = j.at("output").get<std::string>();
    }
    if (j.contains("backend") && !j.at("backend").is_null()) {
        const std::string b = j.at("backend").is_string() ? j.at("backend").get<std::string>() : "";
        if (b == "serial") c.backend = Backend::serial;
        else if (b == "openmp") c.backend = Backend::openmp;
        else throw ConfigError("backend", "must be \"serial\" or \"openmp\"");
    }

    const bool has_domain = !c.domain.is_null(), has_family = !c.family.is_null();
    switch (c.command) {
        case Command::solve:
        case Command::hotspots:
        case Command::simulate:
        case Command::feynman_kac:
        case Command::heat_kernel:
            if (!has_domain) throw ConfigError("domain", "required for " + to_string(c.command));
            break;
        case Command::verify:
            if (!c.lemma) throw ConfigError("lemma", "required for verify");
            if (*c.lemma == LemmaId::eigenvalue_scaling && !has_family) throw ConfigError("family", "required for eigenvalue_scaling");
            if (!has_domain && !has_family) throw ConfigError("domain", "verify needs a domain or a family");
            break;
        case Command::sweep:
            if (!has_family) throw ConfigError("family", "required for sweep");
            if (!c.lemma) c.lemma = LemmaId::main_theorem;
            break;
    }
    if (c.lemma == LemmaId::theorem1_bounds) {
        if (!c.sources.empty() && c.sources.size() < 2) throw ConfigError("sources", "needs at least 2 sources");
        if (!c.times.empty() && c.times.size() < 2) throw ConfigError("times", "needs at least 2 times");
    }
    return c;
}

Json to_json(const RunConfig& c) {
    const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    Json sources = Json::array();
    for (const Vec2& p : c.sources) sources.push_back({p.x, p.y});
    return {{"command", to_string(c.command)},
            {"lemma", c.lemma ? Json(to_string(*c.lemma)) : Json(nullptr)},
            {"domain", c.domain},
            {"family", c.family},
            {"h", opt(c.h)},
            {"dt", opt(c.dt)},
            {"t", opt(c.t)},
            {"delta", opt(c.delta)},
            {"band_epsilon", opt(c.band_epsilon)},
            {"c_max", opt(c.c_max)},
            {"offset", opt(c.offset)},
            {"t_budget", opt(c.t_budget)},
            {"n_paths", c.n_paths ? Json(*c.n_paths) : Json(nullptr)},
            {"eigen_max_iterations", c.eigen_max_iterations ? Json(*c.eigen_max_iterations) : Json(nullptr)},
            {"start", point_json(c.start)},
            {"target", point_json(c.target)},
            {"sources", sources},
            {"times", c.times},
            {"normalize", c.normalize},
            {"seed", c.seed},
            {"output", c.output},
            {"backend", c.backend == Backend::serial ? "serial" : "openmp"},
            {"dump_mesh", c.dump_mesh},
            {"dump_eigenfunction", c.dump_eigenfunction},
            {"dump_endpoints", c.dump_endpoints}};
}

namespace {

struct Flags {
    std::string config_file, domain_kind, domain_json, vertices, family_kind, lemma, start, target, sources, output, backend;
    std::vector<double> params, times;
    double n = 0, h = 0, dt = 0, t = 0, delta = 0, band_epsilon = 0, c_max = 0, offset = 0, t_budget = 0;
    double length_min = 0, length_max = 0;
    int k = 256, points = 12, count = 0;
    std::int64_t n_paths = 0, eigen_max_iterations = 0;
    std::uint64_t seed = 0;
    bool normalize = false, dump_mesh = false, dump_eigenfunction = false, dump_endpoints = false;
};

void add_flags(CLI::App* sub, Flags& f, bool with_lemma) {
    sub->set_help_flag("--help", "print this help and exit");
    sub->add_option("--config", f.config_file, "JSON config file; flags override its keys");
    sub->add_option("--domain", f.domain_kind, "rectangle | ellipse | disk | stadium | random_hull | triangle | polygon");
    sub->add_option("--N", f.n, "elongation: rectangle N x 1, ellipse (N, 1), stadium length N x width, hull box N x 1");
    sub->add_option("--k", f.k, "vertices used to polygonalize curved domains");
    sub->add_option("--points", f.points, "random hull point count");
    sub->add_option("--vertices", f.vertices, "polygon vertices 'x,y;x,y;...'");
    sub->add_option("--domain-json", f.domain_json, "domain spec as a JSON object");
    sub->add_option("--family", f.family_kind, "rectangles | ellipses | stadiums | random_hulls | triangles");
    sub->add_option("--params", f.params, "family parameters (N values or aspects)")->delimiter(',');
    sub->add_option("--count", f.count, "random family member count");
    sub->add_option("--length-min", f.length_min, "random family minimum box length");
    sub->add_option("--length-max", f.length_max, "random family maximum box length");
    if (with_lemma) sub->add_option("--lemma", f.lemma, "main_theorem | lemma1 | lemma2 | lemma3 | lemma4 | theorem1_bounds | "
                                                        "eigenvalue_scaling | nodal_width | hitting_time | stationarity");
    sub->add_option("--h", f.h, "target mesh size");
    sub->add_option("--dt", f.dt, "Brownian time step");
    sub->add_option("--t", f.t, "final time");
    sub->add_option("--delta", f.delta, "small-ball radius / short time");
    sub->add_option("--band-epsilon", f.band_epsilon, "relative hot-spot band");
    sub->add_option("--c-max", f.c_max, "cap on the fitted constant");
    sub->add_option("--offset", f.offset, "hitting-time barrier offset c2");
    sub->add_option("--t-budget", f.t_budget, "hitting-time budget");
    sub->add_option("--n-paths", f.n_paths, "Monte Carlo paths (pairs for lemma2)");
    sub->add_option("--eigen-max-iterations", f.eigen_max_iterations, "eigensolver iteration cap");
    sub->add_option("--start", f.start, "start point 'x,y'");
    sub->add_option("--target", f.target, "second point 'x,y' (lemma3 y)");
    sub->add_option("--sources", f.sources, "heat-kernel sources 'x,y;x,y'");
    sub->add_option("--times", f.times, "heat-kernel times")->delimiter(',');
    sub->add_flag("--normalize", f.normalize, "normalize the domain before solving");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("-o,--output", f.output, "output directory");
    sub->add_option("--backend", f.backend, "serial | openmp");
    sub->add_flag("--dump-mesh", f.dump_mesh, "write mesh CSVs");
    sub->add_flag("--dump-eigenfunction", f.dump_eigenfunction, "write nodal eigenfunction values");
    sub->add_flag("--dump-endpoints", f.dump_endpoints, "write path endpoints");
}

Json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
}

Json merged_config(CLI::App* sub, const Flags& f, Command command) {
    Json j = f.config_file.empty() ? Json::object() : load_config_file(f.config_file);
    if (!j.is_object()) throw ConfigError("config", "must be a JSON object");
    j["command"] = to_string(command);
    const auto given = [&](const char* flag) { return sub->count(flag) > 0; };

    if (given("--seed")) j["seed"] = f.seed;
    const std::uint64_t seed = j.contains("seed") && j["seed"].is_number_unsigned() ? j["seed"].get<std::uint64_t>() : 1;
    if (given("--domain-json")) {
        try {
            j["domain"] = Json::parse(f.domain_json);
        } catch (const Json::parse_error& e) {
            throw ConfigError("domain", std::string("malformed JSON: ") + e.what());
        }
    }
    if (given("--domain")) {
        const std::optional<double> n = given("--N") ? std::optional<double>(f.n) : std::nullopt;
        j["domain"] = domain_from_flags(f.domain_kind, n, f.k, f.points, f.vertices, seed);
    }
    if (given("--family")) {
        Json fam = {{"kind", f.family_kind}, {"k", f.k}, {"points", f.points}};
        if (given("--params")) fam["parameters"] = f.params;
        if (given("--count")) fam["count"] = f.count;
        if (given("--length-min")) fam["length_min"] = f.length_min;
        if (given("--length-max")) fam["length_max"] = f.length_max;
        j["family"] = fam;
    }
    if (sub->get_option_no_throw("--lemma") && given("--lemma")) j["lemma"] = f.lemma;
    const std::pair<const char*, double> numbers[] = {
        {"h", f.h},         {"dt", f.dt},         {"t", f.t},       {"delta", f.delta},
        {"band_epsilon", f.band_epsilon}, {"c_max", f.c_max}, {"offset", f.offset}, {"t_budget", f.t_budget}};
    for (const auto& [key, value] : numbers) {
        std::string flag = std::string("--") + key;
        for (char& ch : flag)
            if (ch == '_') ch = '-';
        if (given(flag.c_str())) j[key] = value;
    }
    if (given("--n-paths")) j["n_paths"] = f.n_paths;
    if (given("--eigen-max-iterations")) j["eigen_max_iterations"] = f.eigen_max_iterations;
    if (given("--start")) {
        const Json p = parse_point_list(f.start, "start");
        if (p.size() != 1) throw ConfigError("start", "expected one 'x,y' pair");
        j["start"] = p[0];
    }
    if (given("--target")) {
        const Json p = parse_point_list(f.target, "target");
        if (p.size() != 1) throw ConfigError("target", "expected one 'x,y' pair");
        j["target"] = p[0];
    }
    if (given("--sources")) j["sources"] = parse_point_list(f.sources, "sources");
    if (given("--times")) j["times"] = f.times;
    if (given("--normalize")) j["normalize"] = f.normalize;
    if (given("--output")) j["output"] = f.output;
    if (given("--backend")) j["backend"] = f.backend;
    if (given("--dump-mesh")) j["dump_mesh"] = f.dump_mesh;
    if (given("--dump-eigenfunction")) j["dump_eigenfunction"] = f.dump_eigenfunction;
    if (given("--dump-endpoints")) j["dump_endpoints"] = f.dump_endpoints;
    return j;
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Neumann hot-spot solver and verification runner", "hotspots"};
    app.require_subcommand(1);
    Flags flags;
    std::vector<std::pair<CLI::App*, Command>> subs;
    const std::pair<Command, const char*> commands[] = {
        {Command::solve, "first nonzero Neumann eigenpair"},
        {Command::hotspots, "extremal points, bands and nodal line"},
        {Command::simulate, "reflected Brownian motion endpoints"},
        {Command::feynman_kac, "compare E phi(B_t) with e^{-mu t} phi"},
        {Command::heat_kernel, "binned Neumann heat kernel estimate"},
        {Command::verify, "run one verification on a domain or family"},
        {Command::sweep, "run one verification over a family and tabulate"},
    };
    for (const auto& [cmd, help] : commands) {
        CLI::App* sub = app.add_subcommand(to_string(cmd), help);
        add_flags(sub, flags, cmd == Command::verify || cmd == Command::sweep);
        subs.emplace_back(sub, cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitPass : kExitInputError;
    }
    for (const auto& [sub, cmd] : subs) {
        if (!sub->parsed()) continue;
        try {
            const RunConfig config = parse_run_config(merged_config(sub, flags, cmd));
            return run(config, out);
        } catch (const ConfigError& e) {
            err << "config error: " << e.what() << "\n";
            return kExitInputError;
        } catch (const InputError& e) {
            err << "input error: " << e.what() << "\n";
            return kExitInputError;
        } catch (const ResourceError& e) {
            err << "resource error: " << e.what() << "\n";
            return kExitInputError;
        } catch (const ConvergenceError& e) {
            err << "no convergence: " << e.what() << " (last residual " << e.last_residual() << ")\n";
            return kExitNonConvergence;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kExitInputError;
        }
    }
    return kExitInputError;
}

}  // namespace hotspots
