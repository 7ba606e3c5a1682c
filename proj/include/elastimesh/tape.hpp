#pragma once

#include "elastimesh/activation.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace elastimesh::ad {

class Tape;

/// Scalar recorded on a Tape, or a plain constant when tape() is null.
///
/// Operations between a constant and a recorded Var record a single
/// constant-operand node; operations between constants record nothing.
class Var {
public:
    Var() = default;
    Var(double constant) : value_(constant) {}  // NOLINT: implicit by design of the algebra

    double value() const noexcept { return value_; }
    Tape* tape() const noexcept { return tape_; }
    std::int32_t index() const noexcept { return index_; }
    bool is_constant() const noexcept { return tape_ == nullptr; }

private:
    friend class Tape;
    Var(Tape* t, std::int32_t idx, double v) : tape_(t), index_(idx), value_(v) {}

    Tape* tape_ = nullptr;
    std::int32_t index_ = -1;
    double value_ = 0.0;
};

enum class Op : std::uint8_t {
    input,
    add,
    sub,
    mul,
    div,
    neg,
    add_c,   // a + c
    sub_c,   // a - c
    rsub_c,  // c - a
    mul_c,   // a * c
    div_c,   // a / c
    rdiv_c,  // c / a
    exp,
    log,
    sin,
    cos,
    tan,
    tanh,
    act,     // activation derivative of order `order` of kind `kind`
};

/// One primitive real operation. Operand indices always precede the node.
struct Node {
    Op op = Op::input;
    Activation kind = Activation::tanh;
    std::uint8_t order = 0;
    bool parameter = false;
    std::int32_t a = -1;
    std::int32_t b = -1;
    double c = 0.0;
    double value = 0.0;
};

/// Linear record of real arithmetic for reverse-mode differentiation.
class Tape {
public:
    /// Independent variable. Parameters are numbered in creation order.
    Var input(double value, bool parameter = false);
    Var parameter(double value) { return input(value, true); }

    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    std::size_t parameter_count() const noexcept { return param_slots_.size(); }
    /// Node index of every parameter slot.
    const std::vector<std::int32_t>& parameter_slots() const noexcept { return param_slots_; }
    std::size_t input_count() const noexcept { return input_slots_.size(); }

    /// Adjoint of every node for the scalar at node `slot`.
    std::vector<double> adjoints(std::size_t slot) const;

    /// Recomputes every node from new input values (creation order, parameters
    /// included). Branch choices of piecewise primitives are re-evaluated.
    void replay(std::span<const double> input_values);

    double value(std::size_t slot) const { return nodes_.at(slot).value; }

    void clear();

    // Recording primitives used by the Var operators.
    Var unary(Op op, const Var& a, double c = 0.0);
    Var binary(Op op, const Var& a, const Var& b);
    Var activation(Activation kind, int order, const Var& a);

private:
    Var push(Node n);

    std::vector<Node> nodes_;
    std::vector<std::int32_t> param_slots_;
    std::vector<std::int32_t> input_slots_;
};

/// Gradient of the scalar `loss` with respect to every parameter slot, in
/// parameter order. A constant loss yields all zeros.
std::vector<double> backprop(const Tape& tape, const Var& loss);
/// As above, addressing the loss by node index.
std::vector<double> backprop(const Tape& tape, std::size_t loss_slot);

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

Var exp(const Var& a);
Var log(const Var& a);
Var sin(const Var& a);
Var cos(const Var& a);
Var tan(const Var& a);
Var tanh(const Var& a);
Var activate(Activation kind, int order, const Var& a);

inline double primal(const Var& v) { return v.value(); }

}  // namespace elastimesh::ad
