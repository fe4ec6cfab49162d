#include "hotspots/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "hotspots/errors.hpp"

namespace hotspots {

namespace {

void reject_unknown(const Json& obj, const std::string& field, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ConfigError(field + "." + key, "unknown key");
}

double number(const Json& obj, const std::string& field, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(field + "." + key, "required");
    const Json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(field + "." + key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field + "." + key, "must be finite");
    return x;
}

double positive(const Json& obj, const std::string& field, const std::string& key) {
    const double x = number(obj, field, key);
    if (!(x > 0.0)) throw ConfigError(field + "." + key, "must be positive");
    return x;
}

int integer(const Json& obj, const std::string& field, const std::string& key, int fallback, int min_value) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(field + "." + key, "must be an integer");
    const auto x = v.get<std::int64_t>();
    if (x < min_value || x > 100'000'000) throw ConfigError(field + "." + key, "must be >= " + std::to_string(min_value));
    return static_cast<int>(x);
}

std::uint64_t seed_of(const Json& obj, const std::string& field) {
    if (!obj.contains("seed")) return 0;
    const Json& v = obj.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError(field + ".seed", "must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::vector<Vec2> points(const Json& obj, const std::string& field, const std::string& key) {
    if (!obj.contains(key) || !obj.at(key).is_array()) throw ConfigError(field + "." + key, "must be an array of [x, y]");
    std::vector<Vec2> out;
    for (const Json& p : obj.at(key)) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw ConfigError(field + "." + key, "entries must be [x, y] number pairs");
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

std::string kind_of(const Json& obj, const std::string& field) {
    if (!obj.is_object()) throw ConfigError(field, "must be an object");
    if (!obj.contains("kind") || !obj.at("kind").is_string()) throw ConfigError(field + ".kind", "required string");
    return obj.at("kind").get<std::string>();
}

Json vertices_json(const ConvexDomain& d) {
    Json v = Json::array();
    for (const Vec2& p : d.vertices()) v.push_back({p.x, p.y});
    return v;
}

}  // namespace

ConvexDomain domain_from_json(const Json& spec, const std::string& field) {
    const std::string kind = kind_of(spec, field);
    try {
        if (kind == "rectangle") {
            reject_unknown(spec, field, {"kind", "length", "height"});
            return make_rectangle(positive(spec, field, "length"), positive(spec, field, "height"));
        }
        if (kind == "ellipse") {
            reject_unknown(spec, field, {"kind", "semi_major", "semi_minor", "k"});
            return make_ellipse(positive(spec, field, "semi_major"), positive(spec, field, "semi_minor"),
                                integer(spec, field, "k", 256, 8));
        }
        if (kind == "disk") {
            reject_unknown(spec, field, {"kind", "radius", "k"});
            return make_disk(positive(spec, field, "radius"), integer(spec, field, "k", 256, 8));
        }
        if (kind == "stadium") {
            reject_unknown(spec, field, {"kind", "straight_length", "radius", "k"});
            return make_stadium(number(spec, field, "straight_length"), positive(spec, field, "radius"),
                                integer(spec, field, "k", 256, 8));
        }
        if (kind == "random_hull") {
            reject_unknown(spec, field, {"kind", "points", "length", "height", "seed"});
            return make_random_hull(integer(spec, field, "points", 12, 3), positive(spec, field, "length"),
                                    positive(spec, field, "height"), seed_of(spec, field));
        }
        if (kind == "triangle" || kind == "polygon") {
            reject_unknown(spec, field, {"kind", "vertices"});
            const std::vector<Vec2> v = points(spec, field, "vertices");
            if (kind == "triangle") {
                if (v.size() != 3) throw ConfigError(field + ".vertices", "a triangle needs exactly 3 vertices");
                return make_triangle(v[0], v[1], v[2]);
            }
            return ConvexDomain(v);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InputError& e) {
        throw ConfigError(field, e.what());
    }
    throw ConfigError(field + ".kind", "unknown domain kind '" + kind + "'");
}

Json domain_to_json(const ConvexDomain& d) {
    const Provenance& p = d.provenance();
    Json j;
    j["kind"] = to_string(p.kind);
    switch (p.kind) {
        case DomainKind::polygon:
        case DomainKind::triangle:
            j["vertices"] = vertices_json(d);
            break;
        case DomainKind::random_hull:
            for (const auto& [k, v] : p.parameters) j[k] = v;
            j["points"] = static_cast<int>(p.parameters.at("points"));
            j["seed"] = p.seed;
            break;
        default:
            for (const auto& [k, v] : p.parameters) j[k] = v;
            if (p.kind != DomainKind::rectangle) j["k"] = p.polygonalization_k;
    }
    return j;
}

FamilyConfig family_from_json(const Json& spec, const std::string& field) {
    const std::string kind = kind_of(spec, field);
    reject_unknown(spec, field, {"kind", "parameters", "count", "points", "length_min", "length_max", "k"});
    FamilyConfig c;
    try {
        c.kind = family_kind_from_string(kind);
    } catch (const InputError&) {
        throw ConfigError(field + ".kind", "unknown family '" + kind + "'");
    }
    if (spec.contains("parameters")) {
        if (!spec.at("parameters").is_array()) throw ConfigError(field + ".parameters", "must be an array of numbers");
        for (const Json& v : spec.at("parameters")) {
            if (!v.is_number()) throw ConfigError(field + ".parameters", "must be an array of numbers");
            c.parameters.push_back(v.get<double>());
        }
    }
    c.count = integer(spec, field, "count", 0, 0);
    c.points = integer(spec, field, "points", c.points, 3);
    if (spec.contains("length_min")) c.length_min = number(spec, field, "length_min");
    if (spec.contains("length_max")) c.length_max = number(spec, field, "length_max");
    c.polygonalization_k = integer(spec, field, "k", c.polygonalization_k, 8);
    return c;
}

Json family_to_json(const FamilyConfig& c) {
    return {{"kind", to_string(c.kind)}, {"parameters", c.parameters}, {"count", c.count},         {"points", c.points},
            {"length_min", c.length_min}, {"length_max", c.length_max}, {"k", c.polygonalization_k}};
}

Json report_to_json(const VerificationReport& r) {
    Json constants = Json::object();
    for (const auto& [k, v] : r.fitted_constants) constants[k] = std::isfinite(v) ? Json(v) : Json(format_number(v));
    Json tolerances = Json::array();
    for (const Check& c : r.tolerances) {
        Json t = {{"constant", c.constant}, {"op", to_string(c.op)}, {"holds", check_holds(c, r.fitted_constants)}};
        if (c.op != CheckOp::finite) t["bound"] = c.bound;
        if (c.op == CheckOp::within_rel) t["target"] = c.target;
        tolerances.push_back(std::move(t));
    }
    Json provenance = {{"kind", to_string(r.domain.kind)},
                       {"parameters", r.domain.parameters},
                       {"polygonalization_k", r.domain.polygonalization_k},
                       {"seed", r.domain.seed}};
    return {{"lemma", to_string(r.lemma)},
            {"domain", r.domain_label},
            {"domain_spec", std::move(provenance)},
            {"fitted_constants", std::move(constants)},
            {"tolerances", std::move(tolerances)},
            {"notes", r.notes},
            {"pass", r.pass},
            {"runtime_seconds", r.runtime_seconds},
            {"seed", r.seed}};
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> text;
    text.reserve(values.size());
    for (double v : values) text.push_back(format_number(v));
    add_text_row(text);
}

void CsvTable::add_text_row(const std::vector<std::string>& values) {
    if (values.size() != header_.size()) throw InputError("csv row has " + std::to_string(values.size()) + " columns, header has " +
                                                          std::to_string(header_.size()));
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += values[i];
    }
    rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    for (const std::string& r : rows_) {
        out += r;
        out += '\n';
    }
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ArtifactBundle::add(const std::string& name, std::string content) {
    for (const auto& [n, _] : files_)
        if (n == name) throw InputError("artifact '" + name + "' added twice");
    files_.emplace_back(name, std::move(content));
}

void ArtifactBundle::add_json(const std::string& name, const Json& value) { add(name, value.dump(2) + "\n"); }

void ArtifactBundle::write(const std::filesystem::path& dir, const Json& config) const {
    std::filesystem::create_directories(dir);
    Json listing = Json::array();
    for (const auto& [name, content] : files_) {
        std::ofstream out(dir / name, std::ios::binary);
        out << content;
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
        listing.push_back({{"path", name}, {"bytes", content.size()}, {"fnv1a", fnv1a_hex(content)}});
    }
    const std::string canonical = config.dump();
    const Json manifest = {{"config", config}, {"config_hash", fnv1a_hex(canonical)}, {"files", std::move(listing)}};
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
}

}  // namespace hotspots
