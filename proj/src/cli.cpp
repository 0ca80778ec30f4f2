#include "wavefront/cli.hpp"

#include "wavefront/oracle.hpp"
#include "wavefront/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace wavefront {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PreconditionError("cannot write '" + path + "'");
    out << text;
}

// Splits on commas outside parentheses.
std::vector<std::string> split_top(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

// Constant expressions such as "0.5", "-1e-3" or "pi/4".
std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split_top(s)) {
        auto e = parse_expression(tok, {});
        out.push_back(evaluate(e, std::span<const Scalar>{}).real());
    }
    return out;
}

// Command-line flags that override the config file.
struct Overrides {
    std::string config_path;
    std::optional<std::string> tol_zero, tol_rank, jet_order, grid, samples, field, route, format;
    std::string output;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key = value settings file (flags override it)");
        app->add_option("--tol-zero", tol_zero, "relative zero tolerance");
        app->add_option("--tol-rank", tol_rank, "relative rank tolerance");
        app->add_option("--jet-order", jet_order, "jet order cap (>= 4)");
        app->add_option("--grid", grid, "grid resolution per axis (scan)");
        app->add_option("--samples", samples, "initial loop samples (zigzag)");
        app->add_option("--field", field, "real | complex (overrides the file)");
        app->add_option("--route", route, "lambda | mu | both");
        app->add_option("--format", format, "json | text | csv");
        app->add_option("-o,--output", output, "write the report here instead of standard output");
    }

    RunConfig resolve() const {
        RunConfig c;
        if (!config_path.empty()) apply_config_text(c, read_file(config_path));
        auto set = [&](const char* key, const std::optional<std::string>& v) {
            if (v) apply_setting(c, key, *v);
        };
        set("tol_zero", tol_zero);
        set("tol_rank", tol_rank);
        set("jet_order", jet_order);
        set("grid", grid);
        set("samples", samples);
        set("field", field);
        set("route", route);
        set("format", format);
        validate(c);
        return c;
    }
};

void emit(const Overrides& o, std::ostream& out, const std::string& text) {
    if (o.output.empty())
        out << text;
    else
        write_file(o.output, text);
}

std::string vector_text(const std::vector<Scalar>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_number(v[i].real());
        if (v[i].imag() != 0.0) s += (v[i].imag() < 0 ? " - " : " + ") + format_number(std::abs(v[i].imag())) + "i";
    }
    return s + ")";
}

int class_exit(const SingularityClass& c) {
    if (c.kind == SingularityClass::Kind::Inconclusive) return exit_inconclusive;
    if (c.kind == SingularityClass::Kind::CorankTooHigh) return exit_numeric;
    return exit_ok;
}

std::string text_summary(const ReportDocument& doc) {
    std::ostringstream os;
    for (const auto& e : doc.entries()) {
        const std::string kind = e.value("kind", "");
        if (kind == "front" || kind == "map") {
            os << kind << " at (";
            const auto& p = e["point"];
            for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i].dump();
            os << "): " << (kind == "map" ? e["morin_label"].get<std::string>() : e["class"]["label"].get<std::string>());
            if (e["class"].contains("reason")) os << " [" << e["class"]["reason"].get<std::string>() << "]";
            os << '\n';
        } else if (kind == "loop") {
            os << "loop " << e["loop"].get<std::string>() << " on " << e["front"].get<std::string>() << ": "
               << (e["coorientable"].get<bool>() ? "co-orientable" : "not co-orientable") << ", "
               << e["crossings"].size() << " crossings";
            if (!e["zigzag"].is_null())
                os << ", raw " << e["raw_sequence"].get<std::string>() << ", normalized "
                   << e["normalized_sequence"].get<std::string>() << ", z = " << e["zigzag"].get<int>();
            if (!e["maslov"].is_null())
                os << ", mu = " << e["maslov"].get<int>() << (e["consistent"].get<bool>() ? " (|mu| = z)" : " (|mu| != z)");
            os << '\n';
        } else if (e.contains("check")) {
            os << (e["pass"].get<bool>() ? "PASS " : "FAIL ") << e["check"].get<std::string>() << '\n';
        }
    }
    for (const auto& w : doc.warnings()) os << "warning: " << w << '\n';
    return os.str();
}

std::string render(const ReportDocument& doc, Format f) {
    return f == Format::Text ? text_summary(doc) : doc.dump();
}

// ---- commands ----

int cmd_classify(const std::string& file, const std::string& point_text, const Overrides& o, std::ostream& out) {
    auto config = o.resolve();
    const std::string text = read_file(file);
    auto def = parse_definition(text);
    auto coords = parse_numbers(point_text);
    Point p(coords.begin(), coords.end());
    ReportDocument doc("classify", config);
    doc.add_input(text);
    doc.add_input(point_text);
    SingularityClass cls;
    std::string csv;
    if (def.kind == "front" && def.map.size() == def.vars.size()) {
        auto map = to_morin_map(def);
        if (config.field) map.field = *config.field;
        if (p.size() != static_cast<std::size_t>(map.n))
            throw PreconditionError("point has " + std::to_string(p.size()) + " coordinates, the map has " +
                                    std::to_string(map.n));
        auto r = classify_morin(map, p, config.tol);
        cls = r.cls;
        doc.add_entry(to_json(r));
        csv = "class\n" + r.cls.label() + "\n";
    } else {
        auto front = to_front(def);
        if (config.field) front.field = *config.field;
        if (p.size() != static_cast<std::size_t>(front.n))
            throw PreconditionError("point has " + std::to_string(p.size()) + " coordinates, the front has " +
                                    std::to_string(front.n));
        if (config.route == Route::Mu && front.n < 2) throw PreconditionError("route mu requires n >= 2");
        auto r = classify(front, p, config.route, config.tol);
        cls = r.cls;
        if (cls.kind == SingularityClass::Kind::Inconclusive) doc.warn("inconclusive point " + vector_text(p) + ": " + cls.reason);
        doc.add_entry(to_json(r));
        ScanResult one;
        one.points.push_back(r);
        csv = locus_csv(front, one);
    }
    emit(o, out, config.format == Format::Csv ? csv : render(doc, config.format));
    return class_exit(cls);
}

Box parse_box(const std::string& s, int n) {
    auto v = parse_numbers(s);
    Box b;
    if (v.size() == 2) {
        b.lo.assign(static_cast<std::size_t>(n), v[0]);
        b.hi.assign(static_cast<std::size_t>(n), v[1]);
    } else if (v.size() == static_cast<std::size_t>(2 * n)) {
        for (int i = 0; i < n; ++i) {
            b.lo.push_back(v[static_cast<std::size_t>(2 * i)]);
            b.hi.push_back(v[static_cast<std::size_t>(2 * i + 1)]);
        }
    } else {
        throw PreconditionError("box needs 'lo,hi' or 2n numbers 'lo1,hi1,...'");
    }
    for (int i = 0; i < n; ++i)
        if (!(b.lo[static_cast<std::size_t>(i)] < b.hi[static_cast<std::size_t>(i)]))
            throw PreconditionError("box bounds must satisfy lo < hi");
    return b;
}

int cmd_scan(const std::string& file, const std::string& box_text, const std::string& csv_path, const Overrides& o,
             std::ostream& out) {
    auto config = o.resolve();
    const std::string text = read_file(file);
    auto front = parse_front(text);
    if (config.field) front.field = *config.field;
    if (config.route == Route::Mu && front.n < 2) throw PreconditionError("route mu requires n >= 2");
    auto box = parse_box(box_text, front.n);
    ReportDocument doc("scan", config);
    doc.add_input(text);
    doc.add_input(box_text);
    auto scan = scan_singular_set(front, box, config.grid, config.route, config.tol);
    for (const auto& r : scan.points) {
        doc.add_entry(to_json(r));
        if (r.cls.kind == SingularityClass::Kind::Inconclusive)
            doc.warn("inconclusive point " + vector_text(r.point) + ": " + r.cls.reason);
    }
    if (scan.dropped > 0) doc.warn(std::to_string(scan.dropped) + " of " + std::to_string(scan.seeds) + " Newton seeds dropped");
    if (scan.errors > 0) doc.warn(std::to_string(scan.errors) + " located points could not be classified");
    const std::string csv = locus_csv(front, scan);
    if (!csv_path.empty()) write_file(csv_path, csv);
    emit(o, out, config.format == Format::Csv ? csv : render(doc, config.format));
    return exit_ok;
}

int cmd_zigzag(const std::string& front_file, const std::string& loop_file, const std::string& csv_path,
               const Overrides& o, std::ostream& out) {
    auto config = o.resolve();
    const std::string ftext = read_file(front_file), ltext = read_file(loop_file);
    auto front = parse_front(ftext);
    auto loop = parse_loop(ltext);
    if (config.field) front.field = *config.field;
    if (o.samples || !o.config_path.empty()) loop.samples = config.samples;
    ReportDocument doc("zigzag", config);
    doc.add_input(ftext);
    doc.add_input(ltext);
    auto r = analyze_loop(front, loop, config.tol);
    doc.add_entry(to_json(r));
    if (r.consistent && !*r.consistent) doc.warn("rotation index and zig-zag number differ");
    if (!r.note.empty()) doc.warn(r.note);
    const std::string csv = angle_trace_csv(r);
    if (!csv_path.empty()) write_file(csv_path, csv);
    emit(o, out, config.format == Format::Csv ? csv : render(doc, config.format));
    return exit_ok;
}

int cmd_fixture(const std::string& kind, int k, int n, const std::string& gamma, const std::string& name,
                const std::string& output, std::ostream& out) {
    std::string text;
    if (kind == "ak-front") {
        auto f = ak_front_normal_form(k, n);
        if (!name.empty()) f.name = name;
        text = to_text(f);
    } else if (kind == "morin") {
        auto m = morin_normal_form(k, n);
        if (!name.empty()) m.name = name;
        text = to_text(m);
    } else if (kind == "tangent-developable") {
        std::vector<Expr> g;
        for (const auto& tok : split_top(gamma)) g.push_back(parse_expression(tok, {"z"}));
        if (g.size() != 4) throw PreconditionError("gamma needs four components in z");
        auto f = tangent_developable_fixture(g);
        if (!name.empty()) f.name = name;
        text = to_text(f);
    } else {
        throw PreconditionError("fixture kind must be ak-front, morin or tangent-developable");
    }
    if (output.empty())
        out << text;
    else
        write_file(output, text);
    return exit_ok;
}

// ---- selfcheck: built-in oracle suite ----

const char* circle_front = "front circle\nvars t\nmap (cos(t), sin(t))\nnormal (cos(t), sin(t))\n";
const char* circle_loop = "loop circle\nparam s\nmap (2*pi*s)\n";
const char* cusp_pair_front =
    "front cusp_pair\nvars t\nmap (-cos(t + 0.5), -cos(4*t + 0.5)/8 + cos(0.5 - 2*t)/4)\nnormal (-cos(3*t), 1)\n";

int cmd_selfcheck(const Overrides& o, std::ostream& out) {
    auto config = o.resolve();
    ReportDocument doc("selfcheck", config);
    bool all = true;
    auto record = [&](const std::string& name, bool pass, const std::string& detail) {
        all = all && pass;
        doc.add_entry(Json{{"check", name}, {"pass", pass}, {"detail", detail}});
    };
    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            auto [pass, detail] = body();
            record(name, pass, detail);
        } catch (const std::exception& e) {
            record(name, false, e.what());
        }
    };
    for (int n = 1; n <= 3; ++n)
        for (int k = 1; k <= n; ++k)
            guarded("ak-front k=" + std::to_string(k) + " n=" + std::to_string(n), [&] {
                auto f = ak_front_normal_form(k, n);
                auto r = classify(parse_front(to_text(f)), Point(static_cast<std::size_t>(n)), Route::Both, config.tol);
                return std::pair{r.cls.is_a(k + 1), r.cls.label()};
            });
    for (int n = 1; n <= 3; ++n)
        for (int k = 1; k <= n; ++k)
            guarded("morin k=" + std::to_string(k) + " n=" + std::to_string(n), [&] {
                auto r = classify_morin(morin_normal_form(k, n), Point(static_cast<std::size_t>(n)), config.tol);
                return std::pair{r.cls.is_a(k), r.cls.label()};
            });
    guarded("versal membership", [&] {
        bool ok = versal_membership(1, {0.0, 0.0}).inside && versal_membership(1, {2.0, -3.0}).inside &&
                  !versal_membership(1, {1.0, 1.0}).inside;
        return std::pair{ok, std::string("t^3 + u1 t + u0 at (0,0), (2,-3), (1,1)")};
    });
    guarded("tangent developable", [&] {
        Expr z = Expr::variable(0);
        auto f = tangent_developable_fixture({z, pow(z, 2), pow(z, 3), pow(z, 4)});
        auto a = classify(f, {0.5, 0.3, 0.0}, Route::Both, config.tol);
        auto b = classify(f, {0.5, 0.0, 0.0}, Route::Both, config.tol);
        return std::pair{a.cls.is_a(2) && b.cls.is_a(3), a.cls.label() + ", " + b.cls.label()};
    });
    guarded("zigzag circle", [&] {
        auto r = analyze_loop(parse_front(circle_front), parse_loop(circle_loop), config.tol);
        bool ok = r.sequence && r.sequence->z == 0 && r.maslov && *r.maslov == 0;
        return std::pair{ok, std::string("z = 0, mu = 0")};
    });
    guarded("zigzag cusp pair", [&] {
        auto r = analyze_loop(parse_front(cusp_pair_front), parse_loop(circle_loop), config.tol);
        bool ok = r.sequence && r.sequence->z == 1 && r.consistent && *r.consistent;
        return std::pair{ok, std::string("z = 1, |mu| = z")};
    });
    emit(o, out, render(doc, config.format == Format::Csv ? Format::Json : config.format));
    return all ? exit_ok : exit_numeric;
}

int exit_for(const Error& e) {
    switch (e.kind()) {
    case Error::Kind::Parse:
    case Error::Kind::Precondition: return exit_parse;
    default: return exit_numeric;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Classify singular points of wave fronts and compute zig-zag numbers.", tool_name};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    Overrides o;
    std::string file, point, box, csv, loop_file;
    auto* classify_cmd = app.add_subcommand("classify", "classify a front or map at a point");
    classify_cmd->add_option("file", file, "front or map definition")->required();
    classify_cmd->add_option("-p,--point", point, "comma-separated coordinates")->required();
    o.attach(classify_cmd);

    Overrides so;
    std::string sfile;
    auto* scan_cmd = app.add_subcommand("scan", "locate and classify the singular set in a box");
    scan_cmd->add_option("file", sfile, "front definition")->required();
    scan_cmd->add_option("-b,--box", box, "'lo,hi' for every axis or 'lo1,hi1,...,lon,hin'")->required();
    scan_cmd->add_option("--csv", csv, "also write the locus CSV here");
    so.attach(scan_cmd);

    Overrides zo;
    std::string zfile, zcsv;
    auto* zig_cmd = app.add_subcommand("zigzag", "zig-zag number and rotation index along a loop");
    zig_cmd->add_option("front", zfile, "front definition")->required();
    zig_cmd->add_option("loop", loop_file, "loop definition")->required();
    zig_cmd->add_option("--csv", zcsv, "also write the angle trace CSV here");
    zo.attach(zig_cmd);

    std::string kind, gamma = "z, z^2, z^3, z^4", name, fout;
    int k = 1, n = 1;
    auto* fix_cmd = app.add_subcommand("fixture", "print a normal-form definition");
    fix_cmd->add_option("kind", kind, "ak-front | morin | tangent-developable")->required();
    fix_cmd->add_option("-k", k, "singularity index");
    fix_cmd->add_option("-n", n, "source dimension");
    fix_cmd->add_option("--gamma", gamma, "four components in z (tangent-developable)");
    fix_cmd->add_option("--name", name, "name in the header");
    fix_cmd->add_option("-o,--output", fout, "write here instead of standard output");

    Overrides co;
    auto* self_cmd = app.add_subcommand("selfcheck", "run the built-in oracle suite");
    co.attach(self_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << tool_version << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_parse;
    }

    try {
        if (*classify_cmd) return cmd_classify(file, point, o, out);
        if (*scan_cmd) return cmd_scan(sfile, box, csv, so, out);
        if (*zig_cmd) return cmd_zigzag(zfile, loop_file, zcsv, zo, out);
        if (*fix_cmd) return cmd_fixture(kind, k, n, gamma, name, fout, out);
        if (*self_cmd) return cmd_selfcheck(co, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_parse;
}

} // namespace wavefront
