#include "wavefront/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace wavefront {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw PreconditionError("setting '" + key + "' expects a number, got '" + v + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw PreconditionError("setting '" + key + "' expects an integer, got '" + v + "'");
    return out;
}

Json scalar_json(Scalar v) {
    if (v.imag() == 0.0) return v.real();
    return Json::array({v.real(), v.imag()});
}

Json scalars_json(const std::vector<Scalar>& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(scalar_json(x));
    return out;
}

Json rank_json(const RankReport& r) {
    return Json{{"rows", r.rows}, {"cols", r.cols}, {"rank", r.rank}, {"singular_values", r.singular_values}};
}

Json chain_json(const LambdaChain& c) {
    return Json{{"values", scalars_json(c.values)}, {"eta", scalars_json(c.eta)}, {"scale", c.scale},
                {"jet_order", c.jet_order}};
}

std::string signs_text(const std::vector<int>& v) {
    std::string s;
    for (int e : v) s += e > 0 ? '+' : '-';
    return s;
}

} // namespace

std::string to_string(Format f) {
    switch (f) {
    case Format::Json: return "json";
    case Format::Text: return "text";
    case Format::Csv: return "csv";
    }
    return "json";
}

Route parse_route(const std::string& s) {
    auto v = lower(trim(s));
    if (v == "lambda") return Route::Lambda;
    if (v == "mu") return Route::Mu;
    if (v == "both") return Route::Both;
    throw PreconditionError("route must be lambda, mu or both, got '" + s + "'");
}

Field parse_field(const std::string& s) {
    auto v = lower(trim(s));
    if (v == "real") return Field::Real;
    if (v == "complex") return Field::Complex;
    throw PreconditionError("field must be real or complex, got '" + s + "'");
}

Format parse_format(const std::string& s) {
    auto v = lower(trim(s));
    if (v == "json") return Format::Json;
    if (v == "text") return Format::Text;
    if (v == "csv") return Format::Csv;
    throw PreconditionError("format must be json, text or csv, got '" + s + "'");
}

void validate(const RunConfig& c) {
    if (!(c.tol.tol_zero > 0.0)) throw PreconditionError("tol_zero must be positive");
    if (!(c.tol.tol_rank > 0.0)) throw PreconditionError("tol_rank must be positive");
    if (c.tol.jet_order < 4) throw PreconditionError("jet order must be at least 4");
    if (c.grid < 2) throw PreconditionError("grid must be at least 2");
    if (c.samples < 8) throw PreconditionError("samples must be at least 8");
}

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
    std::string key = lower(trim(raw_key));
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string value = trim(raw_value);
    if (key == "tol_zero") c.tol.tol_zero = parse_double(key, value);
    else if (key == "tol_rank") c.tol.tol_rank = parse_double(key, value);
    else if (key == "jet_order") c.tol.jet_order = parse_int(key, value);
    else if (key == "grid") c.grid = parse_int(key, value);
    else if (key == "samples") c.samples = parse_int(key, value);
    else if (key == "field") c.field = parse_field(value);
    else if (key == "route") c.route = parse_route(value);
    else if (key == "format") c.format = parse_format(value);
    else throw PreconditionError("unknown setting '" + raw_key + "'");
}

void apply_config_text(RunConfig& c, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError({number, 1}, "expected 'key = value'");
        try {
            apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
        } catch (const PreconditionError& e) {
            throw ParseError({number, static_cast<int>(eq) + 2}, e.what());
        }
    }
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Json to_json(const RunConfig& c) {
    return Json{{"tol_zero", c.tol.tol_zero},
                {"tol_rank", c.tol.tol_rank},
                {"jet_order", c.tol.jet_order},
                {"grid", c.grid},
                {"samples", c.samples},
                {"field", c.field ? (*c.field == Field::Real ? "real" : "complex") : "file"},
                {"route", to_string(c.route)},
                {"format", to_string(c.format)}};
}

Json to_json(const SingularityClass& cls) {
    Json j{{"label", cls.label()}};
    if (cls.kind == SingularityClass::Kind::Inconclusive) j["reason"] = cls.reason;
    return j;
}

Json to_json(const ClassificationReport& r) {
    Json j{{"kind", "front"}, {"point", scalars_json(r.point)}, {"class", to_json(r.cls)}};
    j["route"] = to_string(r.route);
    j["lambda_chain"] = r.chain ? chain_json(*r.chain) : Json(nullptr);
    j["rank"] = rank_json(r.rank);
    if (r.mu)
        j["mu_chain"] = Json{{"values", scalars_json(r.mu->values)}, {"rank", rank_json(r.mu->rank)}};
    else
        j["mu_chain"] = nullptr;
    j["lambda_class"] = r.lambda_class ? Json(r.lambda_class->label()) : Json(nullptr);
    j["mu_class"] = r.mu_class ? Json(r.mu_class->label()) : Json(nullptr);
    j["routes_agree"] = r.lambda_class && r.mu_class ? Json(*r.lambda_class == *r.mu_class) : Json(nullptr);
    j["note"] = r.note;
    return j;
}

Json to_json(const MorinReport& r) {
    Json j{{"kind", "map"}, {"point", scalars_json(r.point)}, {"class", to_json(r.cls)}};
    j["morin_label"] = r.cls.kind == SingularityClass::Kind::A ? "A" + std::to_string(r.cls.index) + "-Morin"
                                                              : r.cls.label();
    j["lambda_chain"] = r.chain ? chain_json(*r.chain) : Json(nullptr);
    j["rank"] = rank_json(r.rank);
    j["note"] = r.note;
    return j;
}

Json to_json(const ZigzagReport& r) {
    Json j{{"kind", "loop"}, {"front", r.front}, {"loop", r.loop}, {"samples", r.samples}};
    j["coorientable"] = r.coorientable;
    j["rho"] = r.rho;
    Json crossings = Json::array();
    for (const auto& c : r.crossings)
        crossings.push_back(Json{{"s", c.s},
                                 {"point", scalars_json(c.point)},
                                 {"image", scalars_json(c.image)},
                                 {"class", c.cls.label()},
                                 {"s_minus", c.s_minus},
                                 {"s_plus", c.s_plus},
                                 {"lambda", c.lambda},
                                 {"null_residual", c.null_residual}});
    j["crossings"] = crossings;
    j["null_loop"] = r.null_loop;
    if (r.sequence) {
        j["raw_sequence"] = signs_text(r.sequence->raw);
        j["normalized_sequence"] = signs_text(r.sequence->normalized);
        j["zigzag"] = r.sequence->z;
    } else {
        j["raw_sequence"] = nullptr;
        j["normalized_sequence"] = nullptr;
        j["zigzag"] = nullptr;
    }
    j["maslov"] = r.maslov ? Json(*r.maslov) : Json(nullptr);
    j["consistent"] = r.consistent ? Json(*r.consistent) : Json(nullptr);
    j["note"] = r.note;
    return j;
}

ReportDocument::ReportDocument(std::string command, const RunConfig& config)
    : command_(std::move(command)), config_(to_json(config)) {}

void ReportDocument::add_input(const std::string& bytes) {
    inputs_ += std::to_string(bytes.size());
    inputs_ += ':';
    inputs_ += bytes;
}

Json ReportDocument::json() const {
    Json j{{"tool", tool_name},
           {"version", tool_version},
           {"command", command_},
           {"input_digest", fnv1a_hex(inputs_)},
           {"config", config_},
           {"entries", entries_},
           {"warnings", warnings_}};
    j["digest"] = fnv1a_hex(j.dump());
    return j;
}

std::string ReportDocument::dump() const { return json().dump(2) + "\n"; }

std::string locus_csv(const FrontInstance& front, const ScanResult& scan) {
    const bool complex = front.field == Field::Complex;
    std::size_t chain_len = 0;
    for (const auto& r : scan.points)
        if (r.chain) chain_len = std::max(chain_len, r.chain->values.size());
    std::ostringstream os;
    auto names = front.vars.empty() ? default_names("x", front.n) : front.vars;
    for (const auto& v : names) {
        os << v << ',';
        if (complex) os << v << "_im,";
    }
    os << "class";
    for (std::size_t i = 0; i < chain_len; ++i) {
        os << ",lambda" << i;
        if (complex) os << ",lambda" << i << "_im";
    }
    os << '\n';
    for (const auto& r : scan.points) {
        for (const auto& x : r.point) {
            os << format_number(x.real()) << ',';
            if (complex) os << format_number(x.imag()) << ',';
        }
        os << r.cls.label();
        for (std::size_t i = 0; i < chain_len; ++i) {
            os << ',';
            if (r.chain && i < r.chain->values.size()) os << format_number(r.chain->values[i].real());
            if (complex) {
                os << ',';
                if (r.chain && i < r.chain->values.size()) os << format_number(r.chain->values[i].imag());
            }
        }
        os << '\n';
    }
    return os.str();
}

} // namespace wavefront
