#pragma once

// Run configuration and the deterministic report document shared by the CLI and the tests.

#include "wavefront/morin.hpp"
#include "wavefront/zigzag.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace wavefront {

inline constexpr const char* tool_name = "frontsing";
inline constexpr const char* tool_version = "1.0.0";

enum class Format { Json, Text, Csv };
std::string to_string(Format f);

struct RunConfig {
    Tolerances tol;
    int grid = 9;
    int samples = 2048;
    std::optional<Field> field; // overrides the file's field tag when set
    Route route = Route::Both;
    Format format = Format::Json;
};

/// Throws PreconditionError on non-positive tolerances, jet order < 4, grid < 2 or samples < 8.
void validate(const RunConfig& config);

/// Applies one `key = value` setting (keys: tol_zero, tol_rank, jet_order, grid, samples, field,
/// route, format; dashes and underscores are interchangeable). Throws PreconditionError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
/// Flat `key = value` lines; `#` starts a comment. Throws ParseError with the line number.
void apply_config_text(RunConfig& config, const std::string& text);

Route parse_route(const std::string& s);
Field parse_field(const std::string& s);
Format parse_format(const std::string& s);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

using Json = nlohmann::ordered_json;

Json to_json(const RunConfig& config);
Json to_json(const SingularityClass& cls);
Json to_json(const ClassificationReport& report);
Json to_json(const MorinReport& report);
Json to_json(const ZigzagReport& report);

/// Fixed-shape report: tool, version, command, input_digest, config, entries, warnings, digest.
/// `digest` is FNV-1a of the compact dump of every other field. Nothing time-dependent is stored.
class ReportDocument {
public:
    ReportDocument(std::string command, const RunConfig& config);

    /// Adds an input (file contents or literal arguments) to the input digest.
    void add_input(const std::string& bytes);
    void add_entry(Json entry) { entries_.push_back(std::move(entry)); }
    void warn(std::string message) { warnings_.push_back(std::move(message)); }

    Json json() const;
    /// Pretty JSON (2-space indent) with a trailing newline.
    std::string dump() const;

    const Json& entries() const { return entries_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    std::string command_;
    Json config_;
    std::string inputs_;
    Json entries_ = Json::array();
    std::vector<std::string> warnings_;
};

/// Scan locus CSV: x1..xn, class, lambda0..lambdaK (real parts; imaginary parts as extra columns
/// for complex fronts). Header only when the scan found nothing.
std::string locus_csv(const FrontInstance& front, const ScanResult& scan);

} // namespace wavefront
