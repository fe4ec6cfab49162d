#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "hotspots/experiments.hpp"

namespace hotspots {

using Json = nlohmann::json;

/// Domain spec objects:
///   {"kind": "rectangle", "length": L, "height": H}
///   {"kind": "ellipse", "semi_major": a, "semi_minor": b, "k": 256}
///   {"kind": "disk", "radius": r, "k": 256}
///   {"kind": "stadium", "straight_length": s, "radius": r, "k": 256}
///   {"kind": "random_hull", "points": n, "length": L, "height": H, "seed": s}
///   {"kind": "triangle" | "polygon", "vertices": [[x, y], ...]}
/// Unknown keys and missing required keys throw ConfigError naming the field.
ConvexDomain domain_from_json(const Json& spec, const std::string& field = "domain");
Json domain_to_json(const ConvexDomain& d);

FamilyConfig family_from_json(const Json& spec, const std::string& field = "family");
Json family_to_json(const FamilyConfig& config);

Json report_to_json(const VerificationReport& report);

/// 17 significant digits; nan and inf as text.
std::string format_number(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(const std::vector<double>& values);
    /// Rows mixing text and numbers; numbers are pre-formatted by the caller.
    void add_text_row(const std::vector<std::string>& values);
    std::size_t row_count() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Files collected in memory and written together with manifest.json.
class ArtifactBundle {
public:
    void add(const std::string& name, std::string content);
    void add_json(const std::string& name, const Json& value);
    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

    /// Creates `dir`, writes every file and the manifest listing each file
    /// with its byte count and hash, plus the config and its hash.
    void write(const std::filesystem::path& dir, const Json& config) const;

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace hotspots
