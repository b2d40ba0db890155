#pragma once

#include "laac/objective.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace laac {

enum class Op : std::uint8_t { add, sub, mul, div, sin, cos, exp, log, sqrt, square, abs, neg };

inline constexpr std::size_t kOpCount = 12;

int arity(Op op) noexcept;
std::string_view op_name(Op op) noexcept;

/// One node of an expression tree stored in prefix order.
struct Node {
    enum class Kind : std::uint8_t { op, coordinate, constant };
    Kind kind = Kind::constant;
    Op op = Op::add;
    std::uint32_t coordinate = 0;
    double value = 0.0;

    static Node make_op(Op o) { return {Kind::op, o, 0, 0.0}; }
    static Node make_coordinate(std::uint32_t i) { return {Kind::coordinate, Op::add, i, 0.0}; }
    static Node make_constant(double v) { return {Kind::constant, Op::add, 0, v}; }

    friend bool operator==(const Node &, const Node &) = default;
};

/// Expression tree over coordinates x0..x{d-1} and real constants.
class ExprTree {
public:
    /// Throws ParameterError if the prefix sequence is not a single well-formed
    /// tree or references a coordinate >= dimension.
    ExprTree(std::vector<Node> prefix, std::size_t dimension);

    const std::vector<Node> &nodes() const noexcept { return nodes_; }
    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t depth() const noexcept { return depth_; }
    bool uses_coordinate() const noexcept;

    friend bool operator==(const ExprTree &, const ExprTree &) = default;

private:
    std::vector<Node> nodes_;
    std::size_t dimension_;
    std::size_t depth_;
};

/// Guards that make evaluation total. Every node result is clamped to +-clamp.
struct Protection {
    double div_guard = 1e-10;
    double log_guard = 1e-10;
    double exp_cap = 50.0;
    double clamp = 1e12;
};

struct RgfGenParams {
    std::size_t max_depth = 6;
    double p_operator = 0.6;
    double p_coordinate = 0.6;
    double constant_min = -5.0;
    double constant_max = 5.0;
    std::uint64_t seed = 0;

    void validate() const;
};

double evaluate_tree(const ExprTree &tree, std::span<const double> x, const Protection &protection = {});

/// Prefix s-expression, e.g. "(add x0 (sin 1.5))". Constants use shortest round-trip formatting.
std::string serialize_tree(const ExprTree &tree);
/// Throws ParseError (with byte offset) on malformed input.
ExprTree deserialize_tree(std::string_view text, std::size_t dimension);

/// Draws a random tree; retries until at least one coordinate appears.
ExprTree generate_tree(const RgfGenParams &params, std::size_t dimension);

class RgfFunction final : public ObjectiveFunction {
public:
    RgfFunction(std::string id, ExprTree tree, Protection protection = {});

    double evaluate_unclamped(std::span<const double> x) const override;
    const ExprTree &tree() const noexcept { return tree_; }

private:
    ExprTree tree_;
    Protection protection_;
};

/// Throws GenerationExhausted after 100 failed attempts.
std::shared_ptr<const RgfFunction> generate_rgf(const RgfGenParams &params, std::size_t dimension);

/// Batch text format: header "rgf-v1 d=<dim>" followed by one tree per line.
void write_rgf_batch(std::ostream &out, std::span<const ExprTree> trees, std::size_t dimension);
std::vector<ExprTree> read_rgf_batch(std::istream &in);

} // namespace laac
