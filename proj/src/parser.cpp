#include "wavefront/front.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace wavefront {

namespace {

enum class Tok { Ident, Number, LParen, RParen, Comma, Plus, Minus, Star, Slash, Caret, End };

struct Token {
    Tok kind;
    std::string text;
    SourceLoc loc;
};

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        SourceLoc loc{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            out.push_back({Tok::Ident, src.substr(i, j - i), loc});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                } else {
                    throw ParseError({line, col + static_cast<int>(j - i)}, "malformed exponent in numeric literal");
                }
            }
            out.push_back({Tok::Number, src.substr(i, j - i), loc});
            advance(j - i);
            continue;
        }
        Tok kind;
        switch (c) {
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case ',': kind = Tok::Comma; break;
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        case '^': kind = Tok::Caret; break;
        default: throw ParseError(loc, std::string("unexpected character '") + c + "'");
        }
        out.push_back({kind, std::string(1, c), loc});
        advance(1);
    }
    out.push_back({Tok::End, "", {line, col}});
    return out;
}

const std::set<std::string>& keywords() {
    static const std::set<std::string> k{"front", "loop", "dim", "vars", "map", "normal", "field",
                                         "param", "samples", "base_normal", "metric"};
    return k;
}

double parse_number(const Token& t) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size() || !std::isfinite(v))
        throw ParseError(t.loc, "invalid numeric literal '" + t.text + "'");
    return v;
}

int parse_int(const Token& t) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (t.kind != Tok::Number || ec != std::errc{} || ptr != t.text.data() + t.text.size())
        throw ParseError(t.loc, "expected an integer, found '" + t.text + "'");
    return v;
}

/// Recursive-descent parser for one expression occupying tokens [pos, end).
class ExprParser {
public:
    ExprParser(const std::vector<Token>& toks, std::size_t begin, std::size_t end, const std::vector<std::string>& vars)
        : toks_(toks), pos_(begin), end_(end), vars_(vars) {}

    Expr parse_all() {
        if (pos_ >= end_) throw ParseError(peek().loc, "expected an expression");
        Expr e = expr();
        if (pos_ < end_) throw ParseError(peek().loc, "unexpected '" + peek().text + "' after expression");
        return e;
    }

private:
    const Token& peek() const { return pos_ < end_ ? toks_[pos_] : end_token(); }
    const Token& end_token() const { return toks_[std::min(end_, toks_.size() - 1)]; }
    bool at(Tok k) const { return pos_ < end_ && toks_[pos_].kind == k; }
    const Token& take() {
        if (pos_ >= end_) throw ParseError(end_token().loc, "unexpected end of expression");
        return toks_[pos_++];
    }
    void expect(Tok k, const char* what) {
        if (!at(k)) throw ParseError(peek().loc, std::string("expected ") + what);
        ++pos_;
    }

    Expr expr() {
        Expr lhs = term();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            const Token& op = take();
            Expr rhs = term();
            lhs = Expr::make_binary(op.kind == Tok::Plus ? Expr::Op::Add : Expr::Op::Sub, lhs, rhs, op.loc);
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = unary();
        while (at(Tok::Star) || at(Tok::Slash)) {
            const Token& op = take();
            Expr rhs = unary();
            lhs = Expr::make_binary(op.kind == Tok::Star ? Expr::Op::Mul : Expr::Op::Div, lhs, rhs, op.loc);
        }
        return lhs;
    }

    Expr unary() {
        if (at(Tok::Minus)) {
            const Token& op = take();
            return Expr::make_unary(Expr::Op::Neg, unary(), op.loc);
        }
        if (at(Tok::Plus)) {
            take();
            return unary();
        }
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (at(Tok::Caret)) {
            const Token& op = take();
            bool negative = false;
            if (at(Tok::Minus)) {
                take();
                negative = true;
            }
            const Token& t = take();
            int k = parse_int(t);
            if (at(Tok::Caret)) throw ParseError(peek().loc, "chained powers need parentheses");
            return Expr::make_power(base, negative ? -k : k, op.loc);
        }
        return base;
    }

    Expr atom() {
        const Token& t = take();
        switch (t.kind) {
        case Tok::Number: return constant(t);
        case Tok::LParen: {
            Expr e = expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::Ident: return identifier(t);
        default: throw ParseError(t.loc, "unexpected '" + t.text + "'");
        }
    }

    Expr constant(const Token& t) { return Expr::constant(parse_number(t), t.loc); }

    Expr identifier(const Token& t) {
        static const std::pair<const char*, Expr::Op> functions[] = {
            {"sin", Expr::Op::Sin}, {"cos", Expr::Op::Cos}, {"exp", Expr::Op::Exp},
            {"log", Expr::Op::Log}, {"sqrt", Expr::Op::Sqrt}};
        for (const auto& [name, op] : functions) {
            if (t.text == name) {
                expect(Tok::LParen, "'(' after function name");
                Expr arg = expr();
                expect(Tok::RParen, "')'");
                return Expr::make_unary(op, arg, t.loc);
            }
        }
        for (std::size_t v = 0; v < vars_.size(); ++v)
            if (vars_[v] == t.text) return Expr::variable(static_cast<int>(v), t.loc);
        if (t.text == "pi") return Expr::constant(std::numbers::pi, t.loc);
        throw ParseError(t.loc, "unknown identifier '" + t.text + "'");
    }

    const std::vector<Token>& toks_;
    std::size_t pos_, end_;
    const std::vector<std::string>& vars_;
};

struct Range {
    std::size_t begin, end;
};

struct RawSections {
    Definition def;
    std::vector<Range> map, normal;
    std::vector<Range> metric;
    SourceLoc dim_loc, map_loc, normal_loc, vars_loc, header_loc;
    bool has_map = false;
};

/// Splits a parenthesized list at top-level commas; pos points at '('. Returns index past ')'.
std::size_t split_list(const std::vector<Token>& toks, std::size_t pos, std::vector<Range>& out) {
    if (toks[pos].kind != Tok::LParen) throw ParseError(toks[pos].loc, "expected '('");
    int depth = 0;
    std::size_t start = pos + 1;
    for (std::size_t i = pos; i < toks.size(); ++i) {
        switch (toks[i].kind) {
        case Tok::LParen: ++depth; break;
        case Tok::RParen:
            if (--depth == 0) {
                if (i > start || !out.empty()) {
                    if (i == start) throw ParseError(toks[i].loc, "empty list element");
                    out.push_back({start, i});
                }
                return i + 1;
            }
            break;
        case Tok::Comma:
            if (depth == 1) {
                if (i == start) throw ParseError(toks[i].loc, "empty list element");
                out.push_back({start, i});
                start = i + 1;
            }
            break;
        case Tok::End: throw ParseError(toks[i].loc, "unterminated '('");
        default: break;
        }
    }
    throw ParseError(toks.back().loc, "unterminated '('");
}

RawSections collect(const std::vector<Token>& toks) {
    RawSections raw;
    std::size_t pos = 0;
    const Token& head = toks[pos];
    if (head.kind != Tok::Ident || (head.text != "front" && head.text != "loop"))
        throw ParseError(head.loc, "expected 'front' or 'loop' header");
    raw.def.kind = head.text;
    raw.header_loc = head.loc;
    ++pos;
    if (toks[pos].kind != Tok::Ident) throw ParseError(toks[pos].loc, "expected a name after '" + head.text + "'");
    raw.def.name = toks[pos++].text;

    std::set<std::string> seen;
    while (toks[pos].kind != Tok::End) {
        const Token& kw = toks[pos];
        if (kw.kind != Tok::Ident || !keywords().count(kw.text) || kw.text == "front" || kw.text == "loop")
            throw ParseError(kw.loc, "expected a section keyword, found '" + kw.text + "'");
        if (!seen.insert(kw.text).second) throw ParseError(kw.loc, "duplicate section '" + kw.text + "'");
        ++pos;
        if (kw.text == "dim") {
            raw.dim_loc = kw.loc;
            int d = parse_int(toks[pos]);
            if (d < 0) throw ParseError(toks[pos].loc, "dimension must be non-negative");
            raw.def.dim = d;
            ++pos;
        } else if (kw.text == "vars") {
            raw.vars_loc = kw.loc;
            for (;;) {
                const Token& v = toks[pos];
                if (v.kind != Tok::Ident) throw ParseError(v.loc, "expected a variable name");
                if (keywords().count(v.text) || v.text == "pi" || v.text == "sin" || v.text == "cos" ||
                    v.text == "exp" || v.text == "log" || v.text == "sqrt")
                    throw ParseError(v.loc, "reserved word '" + v.text + "' cannot name a variable");
                if (std::find(raw.def.vars.begin(), raw.def.vars.end(), v.text) != raw.def.vars.end())
                    throw ParseError(v.loc, "duplicate variable '" + v.text + "'");
                raw.def.vars.push_back(v.text);
                ++pos;
                if (toks[pos].kind != Tok::Comma) break;
                ++pos;
            }
        } else if (kw.text == "map") {
            raw.map_loc = kw.loc;
            raw.has_map = true;
            pos = split_list(toks, pos, raw.map);
        } else if (kw.text == "normal") {
            raw.normal_loc = kw.loc;
            raw.def.has_normal = true;
            pos = split_list(toks, pos, raw.normal);
        } else if (kw.text == "metric") {
            pos = split_list(toks, pos, raw.metric);
        } else if (kw.text == "field") {
            const Token& f = toks[pos];
            if (f.kind == Tok::Ident && f.text == "real")
                raw.def.field = Field::Real;
            else if (f.kind == Tok::Ident && f.text == "complex")
                raw.def.field = Field::Complex;
            else
                throw ParseError(f.loc, "expected 'real' or 'complex'");
            ++pos;
        } else if (kw.text == "param") {
            const Token& p = toks[pos];
            if (p.kind != Tok::Ident || keywords().count(p.text)) throw ParseError(p.loc, "expected a parameter name");
            raw.def.param = p.text;
            ++pos;
        } else if (kw.text == "samples") {
            int s = parse_int(toks[pos]);
            if (s < 8) throw ParseError(toks[pos].loc, "samples must be at least 8");
            raw.def.samples = s;
            ++pos;
        } else if (kw.text == "base_normal") {
            const Token& s = toks[pos];
            if (s.kind == Tok::Plus || s.kind == Tok::Minus) {
                raw.def.base_normal = s.kind == Tok::Plus ? +1 : -1;
                ++pos;
                if (toks[pos].kind == Tok::Number && toks[pos].text == "1") ++pos;
            } else if (s.kind == Tok::Number && s.text == "1") {
                raw.def.base_normal = +1;
                ++pos;
            } else {
                throw ParseError(s.loc, "expected '+' or '-'");
            }
        }
    }
    if (raw.def.kind == "front" && !raw.has_map) throw ParseError(toks[pos].loc, "missing 'map' section");
    if (raw.def.kind == "loop" && !raw.has_map) throw ParseError(toks[pos].loc, "missing 'map' section");
    return raw;
}

std::vector<Expr> parse_list(const std::vector<Token>& toks, const std::vector<Range>& ranges,
                             const std::vector<std::string>& vars) {
    std::vector<Expr> out;
    for (const auto& r : ranges) out.push_back(ExprParser(toks, r.begin, r.end, vars).parse_all());
    return out;
}

std::string join_exprs(const std::vector<Expr>& es, const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (i) s += ", ";
        s += to_string(es[i], names);
    }
    return s;
}

std::string join_names(const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) s += ", ";
        s += names[i];
    }
    return s;
}

std::string sanitize_name(const std::string& name) {
    std::string s;
    for (char c : name) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) s = "f_" + s;
    return s;
}

Definition parse_impl(const std::string& text) {
    auto toks = lex(text);
    RawSections raw = collect(toks);
    Definition& def = raw.def;
    if (def.kind == "front") {
        if (def.vars.empty()) {
            if (!def.dim) throw ParseError(raw.header_loc, "need 'vars' or 'dim'");
            def.vars = default_names("x", *def.dim);
        } else if (def.dim && *def.dim != static_cast<int>(def.vars.size())) {
            throw ParseError(raw.dim_loc, "dim " + std::to_string(*def.dim) + " does not match " +
                                              std::to_string(def.vars.size()) + " variables");
        }
        def.dim = static_cast<int>(def.vars.size());
        def.map = parse_list(toks, raw.map, def.vars);
        def.normal = parse_list(toks, raw.normal, def.vars);
    } else {
        if (!def.vars.empty() || def.dim) throw ParseError(raw.vars_loc, "loops take 'param', not 'vars'/'dim'");
        std::vector<std::string> vars{def.param};
        def.map = parse_list(toks, raw.map, vars);
    }
    for (const auto& r : raw.metric) {
        Expr e = ExprParser(toks, r.begin, r.end, {}).parse_all();
        def.metric.push_back(evaluate(e, std::span<const Scalar>{}, Field::Real).real());
    }
    def.header_loc = raw.header_loc;
    def.map_loc = raw.map_loc;
    def.normal_loc = raw.normal_loc;
    return std::move(def);
}

} // namespace

std::vector<std::string> default_names(const std::string& stem, int n) {
    std::vector<std::string> names;
    for (int i = 1; i <= n; ++i) names.push_back(stem + std::to_string(i));
    return names;
}

Definition parse_definition(const std::string& text) { return parse_impl(text); }

Expr parse_expression(const std::string& text, const std::vector<std::string>& vars) {
    auto toks = lex(text);
    return ExprParser(toks, 0, toks.size() - 1, vars).parse_all();
}

FrontInstance to_front(const Definition& def) {
    if (def.kind != "front") throw ParseError(def.header_loc, "expected a front definition");
    FrontInstance f;
    f.name = def.name;
    f.n = static_cast<int>(def.vars.size());
    f.vars = def.vars;
    f.field = def.field;
    if (static_cast<int>(def.map.size()) != f.n + 1)
        throw ParseError(def.map_loc,
                         "dimension mismatch: map has " + std::to_string(def.map.size()) + " components, expected " +
                             std::to_string(f.n + 1));
    if (def.has_normal && static_cast<int>(def.normal.size()) != f.n + 1)
        throw ParseError(def.normal_loc,
                         "dimension mismatch: normal has " + std::to_string(def.normal.size()) +
                             " components, expected " + std::to_string(f.n + 1));
    f.map = def.map;
    f.normal = def.normal;
    return f;
}

MorinMapInstance to_morin_map(const Definition& def) {
    if (def.kind != "front") throw ParseError(def.header_loc, "expected a map definition");
    MorinMapInstance m;
    m.name = def.name;
    m.n = static_cast<int>(def.vars.size());
    m.vars = def.vars;
    m.field = def.field;
    if (static_cast<int>(def.map.size()) != m.n || m.n == 0)
        throw ParseError(def.map_loc,
                         "dimension mismatch: map has " + std::to_string(def.map.size()) + " components, expected " +
                             std::to_string(m.n));
    if (def.has_normal) throw ParseError(def.normal_loc, "equidimensional maps take no normal");
    m.map = def.map;
    return m;
}

LoopSpec to_loop(const Definition& def) {
    if (def.kind != "loop") throw ParseError(def.header_loc, "expected a loop definition");
    LoopSpec l;
    l.name = def.name;
    l.param = def.param;
    l.map = def.map;
    if (l.map.empty()) throw ParseError(def.map_loc, "loop map must have at least one component");
    if (def.samples) l.samples = *def.samples;
    l.base_normal = def.base_normal;
    l.metric = def.metric;
    return l;
}

FrontInstance parse_front(const std::string& text) { return to_front(parse_impl(text)); }

MorinMapInstance parse_morin_map(const std::string& text) { return to_morin_map(parse_impl(text)); }

LoopSpec parse_loop(const std::string& text) { return to_loop(parse_impl(text)); }

std::string to_text(const FrontInstance& front) {
    std::string s = "front " + sanitize_name(front.name) + "\n";
    s += "dim " + std::to_string(front.n) + "\n";
    if (front.n > 0) s += "vars " + join_names(front.vars) + "\n";
    s += "map (" + join_exprs(front.map, front.vars) + ")\n";
    if (front.has_normal()) s += "normal (" + join_exprs(front.normal, front.vars) + ")\n";
    s += std::string("field ") + std::string(to_string(front.field)) + "\n";
    return s;
}

std::string to_text(const MorinMapInstance& map) {
    std::string s = "front " + sanitize_name(map.name) + "\n";
    s += "dim " + std::to_string(map.n) + "\n";
    s += "vars " + join_names(map.vars) + "\n";
    s += "map (" + join_exprs(map.map, map.vars) + ")\n";
    s += std::string("field ") + std::string(to_string(map.field)) + "\n";
    return s;
}

std::string to_text(const LoopSpec& loop) {
    std::vector<std::string> names{loop.param};
    std::string s = "loop " + sanitize_name(loop.name) + "\n";
    s += "param " + loop.param + "\n";
    s += "map (" + join_exprs(loop.map, names) + ")\n";
    s += "samples " + std::to_string(loop.samples) + "\n";
    s += std::string("base_normal ") + (loop.base_normal > 0 ? "+" : "-") + "\n";
    if (!loop.metric.empty()) {
        s += "metric (";
        for (std::size_t i = 0; i < loop.metric.size(); ++i) {
            if (i) s += ", ";
            s += format_number(loop.metric[i]);
        }
        s += ")\n";
    }
    return s;
}

FrontConditionReport check_front_condition(const FrontInstance& front, int samples, double tol, unsigned seed) {
    FrontConditionReport rep;
    if (!front.has_normal()) return rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int s = 0; s < samples; ++s) {
        Point p(static_cast<std::size_t>(front.n));
        for (auto& x : p) x = uni(rng);
        try {
            auto space = JetSpace::make(p, 1, front.field);
            std::vector<Jet> vars;
            for (int v = 0; v < front.n; ++v) vars.push_back(Jet::variable(space, v));
            auto f = evaluate(front.map, vars);
            auto nu = evaluate(front.normal, vars);
            double nu_norm = 0.0;
            for (const auto& c : nu) nu_norm += std::norm(c.value());
            nu_norm = std::sqrt(nu_norm);
            for (int i = 0; i < front.n; ++i) {
                Scalar dot{};
                double df_norm = 0.0;
                for (int r = 0; r <= front.n; ++r) {
                    dot += f[r].partial(i) * nu[r].value();
                    df_norm += std::norm(f[r].partial(i));
                }
                double rel = std::abs(dot) / std::max(1.0, std::sqrt(df_norm) * nu_norm);
                rep.worst = std::max(rep.worst, rel);
            }
            ++rep.samples;
        } catch (const DomainError&) {
            ++rep.skipped;
        }
    }
    rep.ok = rep.worst <= tol;
    return rep;
}

bool same_structure(const FrontInstance& a, const FrontInstance& b) {
    if (a.n != b.n || a.field != b.field || a.map.size() != b.map.size() || a.normal.size() != b.normal.size())
        return false;
    for (std::size_t i = 0; i < a.map.size(); ++i)
        if (!a.map[i].same_as(b.map[i])) return false;
    for (std::size_t i = 0; i < a.normal.size(); ++i)
        if (!a.normal[i].same_as(b.normal[i])) return false;
    return true;
}

} // namespace wavefront
