#pragma once

#include "wavefront/expr.hpp"
#include "wavefront/scalar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wavefront {

/// f: K^n -> K^{n+1} with an optional normal field nu (n+1 components).
struct FrontInstance {
    std::string name = "front";
    int n = 0;
    std::vector<std::string> vars;
    std::vector<Expr> map;
    std::vector<Expr> normal; // empty when not supplied
    Field field = Field::Real;

    bool has_normal() const noexcept { return !normal.empty(); }
};

/// Equidimensional map K^n -> K^n.
struct MorinMapInstance {
    std::string name = "map";
    int n = 0;
    std::vector<std::string> vars;
    std::vector<Expr> map;
    Field field = Field::Real;
};

/// Closed curve s in [0,1] -> domain of a front.
struct LoopSpec {
    std::string name = "loop";
    std::string param = "s";
    std::vector<Expr> map; // expressions in the single variable s
    int samples = 2048;
    int base_normal = +1;
    std::vector<double> metric; // row-major (n+1)x(n+1); empty = Euclidean
};

/// Raw sections of one definition file before interpretation.
struct Definition {
    std::string kind; // "front" or "loop"
    std::string name;
    std::optional<int> dim;
    std::vector<std::string> vars;
    std::vector<Expr> map;
    std::vector<Expr> normal;
    bool has_normal = false;
    Field field = Field::Real;
    std::string param = "s";
    std::optional<int> samples;
    int base_normal = +1;
    std::vector<double> metric;
    SourceLoc header_loc, map_loc, normal_loc;
};

Definition parse_definition(const std::string& text);
FrontInstance parse_front(const std::string& text);
MorinMapInstance parse_morin_map(const std::string& text);
LoopSpec parse_loop(const std::string& text);

/// Parses a single expression over the given variable names.
Expr parse_expression(const std::string& text, const std::vector<std::string>& vars);

FrontInstance to_front(const Definition& def);
MorinMapInstance to_morin_map(const Definition& def);
LoopSpec to_loop(const Definition& def);

std::string to_text(const FrontInstance& front);
std::string to_text(const MorinMapInstance& map);
std::string to_text(const LoopSpec& loop);

std::vector<std::string> default_names(const std::string& stem, int n);

/// Result of sampling <df(e_i), nu> at random points.
struct FrontConditionReport {
    bool ok = true;
    int samples = 0;
    int skipped = 0; // points outside the expression domain
    double worst = 0.0; // largest relative residual seen
};

/// Samples points in [-1,1]^n (seeded) and checks <f_{x_i}, nu> = 0 to within tol relative.
FrontConditionReport check_front_condition(const FrontInstance& front, int samples = 50, double tol = 1e-9,
                                           unsigned seed = 1);

/// True when both definitions describe the same expression trees.
bool same_structure(const FrontInstance& a, const FrontInstance& b);

} // namespace wavefront
