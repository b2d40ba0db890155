#include "laac/rgf.hpp"

#include "laac/errors.hpp"
#include "laac/io.hpp"
#include "laac/seed.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace laac {

namespace {

constexpr std::array<std::string_view, kOpCount> kOpNames = {"add", "sub", "mul",    "div", "sin", "cos",
                                                             "exp", "log", "sqrt", "square", "abs", "neg"};

constexpr std::size_t kMaxAttempts = 100;

} // namespace

int arity(Op op) noexcept {
    switch (op) {
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
        return 2;
    default:
        return 1;
    }
}

std::string_view op_name(Op op) noexcept { return kOpNames[static_cast<std::size_t>(op)]; }

ExprTree::ExprTree(std::vector<Node> prefix, std::size_t dimension)
    : nodes_(std::move(prefix)), dimension_(dimension), depth_(0) {
    if (nodes_.empty()) {
        throw ParameterError("expression tree is empty");
    }
    // stack of (depth, children still expected)
    std::vector<std::pair<std::size_t, int>> open;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (k > 0 && open.empty()) {
            throw ParameterError("expression tree has trailing nodes");
        }
        const std::size_t depth = open.empty() ? 1 : open.back().first + 1;
        depth_ = std::max(depth_, depth);
        if (!open.empty()) {
            --open.back().second;
        }
        const Node &n = nodes_[k];
        if (n.kind == Node::Kind::coordinate && n.coordinate >= dimension_) {
            throw ParameterError("coordinate x" + std::to_string(n.coordinate) + " out of range for d=" +
                                 std::to_string(dimension_));
        }
        if (n.kind == Node::Kind::op) {
            open.emplace_back(depth, arity(n.op));
        }
        while (!open.empty() && open.back().second == 0) {
            open.pop_back();
        }
    }
    if (!open.empty()) {
        throw ParameterError("expression tree is incomplete");
    }
}

bool ExprTree::uses_coordinate() const noexcept {
    return std::ranges::any_of(nodes_, [](const Node &n) { return n.kind == Node::Kind::coordinate; });
}

void RgfGenParams::validate() const {
    if (max_depth < 2) {
        throw ParameterError("RGF max_depth must be at least 2");
    }
    if (!(p_operator > 0.0 && p_operator < 1.0) || !(p_coordinate > 0.0 && p_coordinate < 1.0)) {
        throw ParameterError("RGF probabilities must lie in (0, 1)");
    }
    if (!(constant_min <= constant_max)) {
        throw ParameterError("RGF constant range is empty");
    }
}

namespace {

double eval_node(const std::vector<Node> &nodes, std::size_t &pos, std::span<const double> x, const Protection &p) {
    const Node &n = nodes[pos++];
    double r = 0.0;
    switch (n.kind) {
    case Node::Kind::coordinate:
        r = x[n.coordinate];
        break;
    case Node::Kind::constant:
        r = n.value;
        break;
    case Node::Kind::op: {
        const double a = eval_node(nodes, pos, x, p);
        if (arity(n.op) == 2) {
            const double b = eval_node(nodes, pos, x, p);
            switch (n.op) {
            case Op::add:
                r = a + b;
                break;
            case Op::sub:
                r = a - b;
                break;
            case Op::mul:
                r = a * b;
                break;
            default:
                r = std::abs(b) > p.div_guard ? a / b : 1.0;
                break;
            }
        } else {
            switch (n.op) {
            case Op::sin:
                r = std::sin(a);
                break;
            case Op::cos:
                r = std::cos(a);
                break;
            case Op::exp:
                r = std::exp(std::min(a, p.exp_cap));
                break;
            case Op::log:
                r = std::log(std::abs(a) + p.log_guard);
                break;
            case Op::sqrt:
                r = std::sqrt(std::abs(a));
                break;
            case Op::square:
                r = a * a;
                break;
            case Op::abs:
                r = std::abs(a);
                break;
            default:
                r = -a;
                break;
            }
        }
        break;
    }
    }
    return std::clamp(r, -p.clamp, p.clamp);
}

Node random_node(Rng &rng, const RgfGenParams &params, std::size_t depth, std::size_t dimension) {
    if (depth < params.max_depth && uniform01(rng) < params.p_operator) {
        return Node::make_op(static_cast<Op>(uniform_index(rng, kOpCount)));
    }
    if (uniform01(rng) < params.p_coordinate) {
        return Node::make_coordinate(static_cast<std::uint32_t>(uniform_index(rng, dimension)));
    }
    return Node::make_constant(uniform(rng, params.constant_min, params.constant_max));
}

void grow(Rng &rng, const RgfGenParams &params, std::size_t depth, std::size_t dimension, std::vector<Node> &out) {
    const Node n = random_node(rng, params, depth, dimension);
    out.push_back(n);
    if (n.kind == Node::Kind::op) {
        for (int c = 0; c < arity(n.op); ++c) {
            grow(rng, params, depth + 1, dimension, out);
        }
    }
}

void write_node(const std::vector<Node> &nodes, std::size_t &pos, std::string &out) {
    const Node &n = nodes[pos++];
    switch (n.kind) {
    case Node::Kind::coordinate:
        out += 'x';
        out += std::to_string(n.coordinate);
        return;
    case Node::Kind::constant:
        out += format_double(n.value);
        return;
    case Node::Kind::op:
        out += '(';
        out += op_name(n.op);
        for (int c = 0; c < arity(n.op); ++c) {
            out += ' ';
            write_node(nodes, pos, out);
        }
        out += ')';
        return;
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    void parse_node(std::vector<Node> &out) {
        skip_space();
        if (pos_ >= text_.size()) {
            throw ParseError("unexpected end of expression", pos_);
        }
        if (text_[pos_] == '(') {
            ++pos_;
            const std::size_t name_start = pos_;
            const auto name = read_atom();
            const auto it = std::ranges::find(kOpNames, name);
            if (it == kOpNames.end()) {
                throw ParseError("unknown operator '" + std::string(name) + "'", name_start);
            }
            const auto op = static_cast<Op>(it - kOpNames.begin());
            out.push_back(Node::make_op(op));
            for (int c = 0; c < arity(op); ++c) {
                parse_node(out);
            }
            skip_space();
            if (pos_ >= text_.size() || text_[pos_] != ')') {
                throw ParseError("expected ')'", pos_);
            }
            ++pos_;
            return;
        }
        const std::size_t start = pos_;
        const auto atom = read_atom();
        if (atom.empty()) {
            throw ParseError("expected operand", start);
        }
        if (atom[0] == 'x') {
            const auto digits = atom.substr(1);
            if (digits.empty() || !std::ranges::all_of(digits, [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
                throw ParseError("malformed coordinate '" + std::string(atom) + "'", start);
            }
            out.push_back(Node::make_coordinate(static_cast<std::uint32_t>(std::stoul(std::string(digits)))));
            return;
        }
        try {
            out.push_back(Node::make_constant(parse_double(atom)));
        } catch (const ParameterError &) {
            throw ParseError("malformed constant '" + std::string(atom) + "'", start);
        }
    }

    void expect_end() {
        skip_space();
        if (pos_ != text_.size()) {
            throw ParseError("trailing characters", pos_);
        }
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
            ++pos_;
        }
    }

    std::string_view read_atom() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
               std::isspace(static_cast<unsigned char>(text_[pos_])) == 0) {
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::size_t parse_header(const std::string &line) {
    constexpr std::string_view prefix = "rgf-v1 d=";
    if (line.rfind(prefix, 0) != 0) {
        throw ParseError("missing 'rgf-v1 d=<dim>' header", 0);
    }
    const auto digits = line.substr(prefix.size());
    if (digits.empty() || !std::ranges::all_of(digits, [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
        throw ParseError("malformed dimension in header", prefix.size());
    }
    return std::stoul(digits);
}

} // namespace

double evaluate_tree(const ExprTree &tree, std::span<const double> x, const Protection &protection) {
    if (x.size() != tree.dimension()) {
        throw ParameterError("point dimension does not match tree dimension");
    }
    std::size_t pos = 0;
    return eval_node(tree.nodes(), pos, x, protection);
}

std::string serialize_tree(const ExprTree &tree) {
    std::string out;
    std::size_t pos = 0;
    write_node(tree.nodes(), pos, out);
    return out;
}

ExprTree deserialize_tree(std::string_view text, std::size_t dimension) {
    Parser parser(text);
    std::vector<Node> nodes;
    parser.parse_node(nodes);
    parser.expect_end();
    return {std::move(nodes), dimension};
}

ExprTree generate_tree(const RgfGenParams &params, std::size_t dimension) {
    params.validate();
    if (dimension == 0) {
        throw ParameterError("RGF dimension must be positive");
    }
    Rng rng(derive_seed({params.seed, 0x726766ULL, dimension}));
    for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::vector<Node> nodes;
        grow(rng, params, 1, dimension, nodes);
        ExprTree tree(std::move(nodes), dimension);
        if (tree.uses_coordinate()) {
            return tree;
        }
    }
    throw GenerationExhausted("no tree with a coordinate operand after " + std::to_string(kMaxAttempts) +
                              " attempts");
}

RgfFunction::RgfFunction(std::string id, ExprTree tree, Protection protection)
    : ObjectiveFunction(std::move(id), tree.dimension()), tree_(std::move(tree)), protection_(protection) {}

double RgfFunction::evaluate_unclamped(std::span<const double> x) const {
    std::size_t pos = 0;
    return eval_node(tree_.nodes(), pos, x, protection_);
}

std::shared_ptr<const RgfFunction> generate_rgf(const RgfGenParams &params, std::size_t dimension) {
    return std::make_shared<const RgfFunction>("rgf_d" + std::to_string(dimension) + "_s" + std::to_string(params.seed),
                                               generate_tree(params, dimension));
}

void write_rgf_batch(std::ostream &out, std::span<const ExprTree> trees, std::size_t dimension) {
    out << "rgf-v1 d=" << dimension << '\n';
    for (const auto &t : trees) {
        if (t.dimension() != dimension) {
            throw ParameterError("tree dimension differs from batch dimension");
        }
        out << serialize_tree(t) << '\n';
    }
}

std::vector<ExprTree> read_rgf_batch(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty RGF batch", 0);
    }
    const std::size_t d = parse_header(line);
    std::vector<ExprTree> trees;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        trees.push_back(deserialize_tree(line, d));
    }
    return trees;
}

} // namespace laac
