#include "elastimesh/tape.hpp"

#include "elastimesh/errors.hpp"

#include <cmath>

namespace elastimesh {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::relu: return "relu";
        case Activation::leakyrelu: return "leakyrelu";
        case Activation::elu: return "elu";
        case Activation::selu: return "selu";
    }
    return "?";
}

std::optional<Activation> parse_activation(std::string_view name) {
    for (auto a : {Activation::tanh, Activation::sigmoid, Activation::relu, Activation::leakyrelu,
                   Activation::elu, Activation::selu})
        if (name == activation_name(a)) return a;
    return std::nullopt;
}

}  // namespace elastimesh

namespace elastimesh::ad {

namespace {

// Forward value of a node from its operand values. Recording and replay both
// go through here, which keeps replay bit-exact.
double evaluate(const Node& n, double a, double b) {
    switch (n.op) {
        case Op::input: return n.value;
        case Op::add: return a + b;
        case Op::sub: return a - b;
        case Op::mul: return a * b;
        case Op::div: return a / b;
        case Op::neg: return -a;
        case Op::add_c: return a + n.c;
        case Op::sub_c: return a - n.c;
        case Op::rsub_c: return n.c - a;
        case Op::mul_c: return a * n.c;
        case Op::div_c: return a / n.c;
        case Op::rdiv_c: return n.c / a;
        case Op::exp: return std::exp(a);
        case Op::log: return std::log(a);
        case Op::sin: return std::sin(a);
        case Op::cos: return std::cos(a);
        case Op::tan: return std::tan(a);
        case Op::tanh: return std::tanh(a);
        case Op::act: return activation_derivative(n.kind, n.order, a);
    }
    return 0.0;
}

// Local partials d(node)/d(operand a), d(node)/d(operand b).
std::pair<double, double> partials(const Node& n, double a, double b) {
    switch (n.op) {
        case Op::input: return {0.0, 0.0};
        case Op::add: return {1.0, 1.0};
        case Op::sub: return {1.0, -1.0};
        case Op::mul: return {b, a};
        case Op::div: return {1.0 / b, -a / (b * b)};
        case Op::neg: return {-1.0, 0.0};
        case Op::add_c:
        case Op::sub_c: return {1.0, 0.0};
        case Op::rsub_c: return {-1.0, 0.0};
        case Op::mul_c: return {n.c, 0.0};
        case Op::div_c: return {1.0 / n.c, 0.0};
        case Op::rdiv_c: return {-n.c / (a * a), 0.0};
        case Op::exp: return {n.value, 0.0};
        case Op::log: return {1.0 / a, 0.0};
        case Op::sin: return {std::cos(a), 0.0};
        case Op::cos: return {-std::sin(a), 0.0};
        case Op::tan: return {1.0 + n.value * n.value, 0.0};
        case Op::tanh: return {1.0 - n.value * n.value, 0.0};
        case Op::act: return {activation_derivative(n.kind, n.order + 1, a), 0.0};
    }
    return {0.0, 0.0};
}

Tape* common_tape(const Var& a, const Var& b) {
    if (a.tape() && b.tape() && a.tape() != b.tape())
        throw InvalidArgument("operands recorded on different tapes");
    return a.tape() ? a.tape() : b.tape();
}

}  // namespace

Var Tape::push(Node n) {
    const double a = n.a >= 0 ? nodes_[static_cast<std::size_t>(n.a)].value : 0.0;
    const double b = n.b >= 0 ? nodes_[static_cast<std::size_t>(n.b)].value : 0.0;
    n.value = evaluate(n, a, b);
    nodes_.push_back(n);
    const auto idx = static_cast<std::int32_t>(nodes_.size() - 1);
    return Var(this, idx, n.value);
}

Var Tape::input(double value, bool parameter) {
    Node n;
    n.op = Op::input;
    n.value = value;
    n.parameter = parameter;
    Var v = push(n);
    input_slots_.push_back(v.index());
    if (parameter) param_slots_.push_back(v.index());
    return v;
}

Var Tape::unary(Op op, const Var& a, double c) {
    Node n;
    n.op = op;
    n.a = a.index();
    n.c = c;
    return push(n);
}

Var Tape::binary(Op op, const Var& a, const Var& b) {
    Node n;
    n.op = op;
    n.a = a.index();
    n.b = b.index();
    return push(n);
}

Var Tape::activation(Activation kind, int order, const Var& a) {
    Node n;
    n.op = Op::act;
    n.kind = kind;
    n.order = static_cast<std::uint8_t>(order);
    n.a = a.index();
    return push(n);
}

std::vector<double> Tape::adjoints(std::size_t slot) const {
    if (slot >= nodes_.size())
        throw InvalidArgument("backprop: slot " + std::to_string(slot) + " is not on the tape");
    std::vector<double> adj(slot + 1, 0.0);
    adj[slot] = 1.0;
    for (std::size_t k = slot + 1; k-- > 0;) {
        const double g = adj[k];
        if (g == 0.0) continue;
        const Node& n = nodes_[k];
        if (n.a < 0) continue;
        const double av = nodes_[static_cast<std::size_t>(n.a)].value;
        const double bv = n.b >= 0 ? nodes_[static_cast<std::size_t>(n.b)].value : 0.0;
        const auto [da, db] = partials(n, av, bv);
        adj[static_cast<std::size_t>(n.a)] += g * da;
        if (n.b >= 0) adj[static_cast<std::size_t>(n.b)] += g * db;
    }
    adj.resize(nodes_.size(), 0.0);
    return adj;
}

void Tape::replay(std::span<const double> input_values) {
    if (input_values.size() != input_slots_.size())
        throw InvalidArgument("replay: expected " + std::to_string(input_slots_.size()) +
                              " input values");
    for (std::size_t k = 0; k < input_slots_.size(); ++k)
        nodes_[static_cast<std::size_t>(input_slots_[k])].value = input_values[k];
    for (auto& n : nodes_) {
        if (n.op == Op::input) continue;
        const double a = n.a >= 0 ? nodes_[static_cast<std::size_t>(n.a)].value : 0.0;
        const double b = n.b >= 0 ? nodes_[static_cast<std::size_t>(n.b)].value : 0.0;
        n.value = evaluate(n, a, b);
    }
}

void Tape::clear() {
    nodes_.clear();
    param_slots_.clear();
    input_slots_.clear();
}

std::vector<double> backprop(const Tape& tape, std::size_t loss_slot) {
    const auto adj = tape.adjoints(loss_slot);
    std::vector<double> grad;
    grad.reserve(tape.parameter_count());
    for (auto s : tape.parameter_slots()) grad.push_back(adj[static_cast<std::size_t>(s)]);
    return grad;
}

std::vector<double> backprop(const Tape& tape, const Var& loss) {
    if (loss.is_constant()) return std::vector<double>(tape.parameter_count(), 0.0);
    if (loss.tape() != &tape) throw InvalidArgument("backprop: loss is not on this tape");
    return backprop(tape, static_cast<std::size_t>(loss.index()));
}

Var operator+(const Var& a, const Var& b) {
    Tape* t = common_tape(a, b);
    if (!t) return Var(a.value() + b.value());
    if (a.is_constant()) return t->unary(Op::add_c, b, a.value());
    if (b.is_constant()) return t->unary(Op::add_c, a, b.value());
    return t->binary(Op::add, a, b);
}

Var operator-(const Var& a, const Var& b) {
    Tape* t = common_tape(a, b);
    if (!t) return Var(a.value() - b.value());
    if (a.is_constant()) return t->unary(Op::rsub_c, b, a.value());
    if (b.is_constant()) return t->unary(Op::sub_c, a, b.value());
    return t->binary(Op::sub, a, b);
}

Var operator*(const Var& a, const Var& b) {
    Tape* t = common_tape(a, b);
    if (!t) return Var(a.value() * b.value());
    if (a.is_constant()) return t->unary(Op::mul_c, b, a.value());
    if (b.is_constant()) return t->unary(Op::mul_c, a, b.value());
    return t->binary(Op::mul, a, b);
}

Var operator/(const Var& a, const Var& b) {
    Tape* t = common_tape(a, b);
    if (!t) return Var(a.value() / b.value());
    if (a.is_constant()) return t->unary(Op::rdiv_c, b, a.value());
    if (b.is_constant()) return t->unary(Op::div_c, a, b.value());
    return t->binary(Op::div, a, b);
}

Var operator-(const Var& a) {
    if (a.is_constant()) return Var(-a.value());
    return a.tape()->unary(Op::neg, a);
}

#define ELASTIMESH_VAR_UNARY(name, fn)                               \
    Var name(const Var& a) {                                         \
        if (a.is_constant()) return Var(fn(a.value()));              \
        return a.tape()->unary(Op::name, a);                         \
    }

ELASTIMESH_VAR_UNARY(exp, std::exp)
ELASTIMESH_VAR_UNARY(log, std::log)
ELASTIMESH_VAR_UNARY(sin, std::sin)
ELASTIMESH_VAR_UNARY(cos, std::cos)
ELASTIMESH_VAR_UNARY(tan, std::tan)
ELASTIMESH_VAR_UNARY(tanh, std::tanh)

#undef ELASTIMESH_VAR_UNARY

Var activate(Activation kind, int order, const Var& a) {
    if (a.is_constant()) return Var(activation_derivative(kind, order, a.value()));
    return a.tape()->activation(kind, order, a);
}

}  // namespace elastimesh::ad
