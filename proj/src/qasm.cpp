// Copyright 2026 The qtamper Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtamper/qasm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "qtamper/error.hpp"

namespace qtamper {

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok {
    Ident,
    Number,
    String,
    Symbol,
    Arrow,
    End,
};

struct Token {
    Tok kind{Tok::End};
    std::string text;
    double number{0.0};
    int line{1};
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            if (pos_ >= src_.size()) {
                out.push_back(Token{Tok::End, "<eof>", 0.0, line_});
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                const auto start = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                        src_[pos_] == '_')) {
                    ++pos_;
                }
                out.push_back(
                    Token{Tok::Ident, std::string(src_.substr(start, pos_ - start)), 0.0, line_});
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                out.push_back(number());
            } else if (c == '"') {
                const auto start = ++pos_;
                while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
                    ++pos_;
                }
                if (pos_ >= src_.size() || src_[pos_] != '"') {
                    throw SyntaxError("unterminated string literal", line_);
                }
                out.push_back(
                    Token{Tok::String, std::string(src_.substr(start, pos_ - start)), 0.0, line_});
                ++pos_;
            } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                out.push_back(Token{Tok::Arrow, "->", 0.0, line_});
                pos_ += 2;
            } else if (c == '=' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                // only meaningful inside if(...), which the parser rejects
                out.push_back(Token{Tok::Symbol, "==", 0.0, line_});
                pos_ += 2;
            } else if (std::string_view(";,()[]{}+-*/^").find(c) != std::string_view::npos) {
                out.push_back(Token{Tok::Symbol, std::string(1, c), 0.0, line_});
                ++pos_;
            } else {
                throw SyntaxError(std::string("unexpected character '") + c + "'", line_);
            }
        }
    }

  private:
    void skip_space() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                return;
            }
        }
    }

    Token number() {
        const auto start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                ++pos_;
            }
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            }
        }
        const auto text = src_.substr(start, pos_ - start);
        double v = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
            throw SyntaxError("malformed number '" + std::string(text) + "'", line_);
        }
        return Token{Tok::Number, std::string(text), v, line_};
    }

    std::string_view src_;
    std::size_t pos_{0};
    int line_{1};
};

// ----------------------------------------------------------- expressions

struct Expr {
    enum class Op { Num, Param, Neg, Add, Sub, Mul, Div, Pow, Call };
    Op op{Op::Num};
    double value{0.0};
    std::string name;
    std::vector<Expr> args;
    int line{0};

    double eval(const std::map<std::string, double> &env) const {
        switch (op) {
        case Op::Num:
            return value;
        case Op::Param: {
            const auto it = env.find(name);
            if (it == env.end()) {
                throw SyntaxError("unknown parameter '" + name + "'", line);
            }
            return it->second;
        }
        case Op::Neg:
            return -args[0].eval(env);
        case Op::Add:
            return args[0].eval(env) + args[1].eval(env);
        case Op::Sub:
            return args[0].eval(env) - args[1].eval(env);
        case Op::Mul:
            return args[0].eval(env) * args[1].eval(env);
        case Op::Div:
            return args[0].eval(env) / args[1].eval(env);
        case Op::Pow:
            return std::pow(args[0].eval(env), args[1].eval(env));
        case Op::Call: {
            const double x = args[0].eval(env);
            if (name == "sin") return std::sin(x);
            if (name == "cos") return std::cos(x);
            if (name == "tan") return std::tan(x);
            if (name == "exp") return std::exp(x);
            if (name == "ln") return std::log(x);
            if (name == "sqrt") return std::sqrt(x);
            throw SyntaxError("unknown function '" + name + "'", line);
        }
        }
        return 0.0;
    }
};

// ----------------------------------------------------------------- AST

struct Operand {
    std::string reg;
    std::optional<std::size_t> index;
    int line{0};
};

/// One gate application inside a `gate` body.
struct BodyCall {
    std::string name;
    std::vector<Expr> params;
    std::vector<std::string> qargs;
    int line{0};
};

struct Macro {
    std::vector<std::string> params;
    std::vector<std::string> qargs;
    std::vector<BodyCall> body;
};

struct Register {
    std::size_t offset{0};
    std::size_t size{0};
};

struct Primitive {
    GateKind kind;
};

std::optional<GateKind> primitive(std::string_view name) {
    if (name == "U" || name == "u") {
        return GateKind::U3;
    }
    if (name == "CX") {
        return GateKind::CX;
    }
    if (name == "p") {
        return GateKind::U1;
    }
    if (name == "measure" || name == "barrier") {
        return std::nullopt;
    }
    return gate_from_name(name);
}

// --------------------------------------------------------------- parser

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Circuit run(std::string name) {
        if (peek_ident("OPENQASM")) {
            next();
            const auto &v = expect(Tok::Number, "version number");
            if (v.text.rfind("2", 0) != 0) {
                throw SyntaxError("only OpenQASM 2.x is supported", v.line);
            }
            expect_symbol(";");
        }
        while (peek().kind != Tok::End) {
            statement();
        }
        if (qubits_ == 0) {
            throw SyntaxError("program declares no qubits", peek().line);
        }
        Circuit circuit(qubits_, clbits_, std::move(name));
        for (auto &[inst, line] : instructions_) {
            try {
                circuit.add(std::move(inst));
            } catch (const IndexError &e) {
                throw IndexError("line " + std::to_string(line) + ": " + e.what());
            } catch (const InvalidArgument &e) {
                throw SyntaxError(e.what(), line);
            }
        }
        return circuit;
    }

  private:
    // -- token helpers
    const Token &peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token &next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool peek_symbol(std::string_view s) const {
        return peek().kind == Tok::Symbol && peek().text == s;
    }
    bool peek_ident(std::string_view s) const {
        return peek().kind == Tok::Ident && peek().text == s;
    }
    const Token &expect(Tok kind, std::string_view what) {
        if (peek().kind != kind) {
            throw SyntaxError("expected " + std::string(what) + " but found '" + peek().text + "'",
                              peek().line);
        }
        return next();
    }
    void expect_symbol(std::string_view s) {
        if (!peek_symbol(s)) {
            throw SyntaxError("expected '" + std::string(s) + "' but found '" + peek().text + "'",
                              peek().line);
        }
        next();
    }
    std::size_t expect_index() {
        const auto &t = expect(Tok::Number, "integer index");
        std::size_t v = 0;
        const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size()) {
            throw SyntaxError("expected a non-negative integer, found '" + t.text + "'", t.line);
        }
        return v;
    }

    // -- statements
    void statement() {
        const Token &t = peek();
        if (t.kind != Tok::Ident) {
            throw SyntaxError("expected a statement but found '" + t.text + "'", t.line);
        }
        if (t.text == "include") {
            next();
            expect(Tok::String, "file name");
            expect_symbol(";");
        } else if (t.text == "qreg" || t.text == "creg") {
            declare(t.text == "qreg");
        } else if (t.text == "gate") {
            gate_definition();
        } else if (t.text == "measure") {
            measure();
        } else if (t.text == "barrier") {
            barrier();
        } else if (t.text == "opaque" || t.text == "reset" || t.text == "if") {
            throw UnsupportedGate("line " + std::to_string(t.line) + ": '" + t.text +
                                  "' is outside the supported subset");
        } else {
            gate_call();
        }
    }

    void declare(bool quantum) {
        next();
        const auto &id = expect(Tok::Ident, "register name");
        expect_symbol("[");
        const auto size = expect_index();
        expect_symbol("]");
        expect_symbol(";");
        if (size == 0) {
            throw SyntaxError("register '" + id.text + "' has size 0", id.line);
        }
        if (qregs_.count(id.text) || cregs_.count(id.text)) {
            throw SyntaxError("register '" + id.text + "' redeclared", id.line);
        }
        auto &total = quantum ? qubits_ : clbits_;
        (quantum ? qregs_ : cregs_)[id.text] = Register{total, size};
        total += size;
        if (quantum && qubits_ > kMaxQubits) {
            throw CapacityExceeded("line " + std::to_string(id.line) + ": more than " +
                                   std::to_string(kMaxQubits) + " qubits declared");
        }
    }

    Operand operand() {
        const auto &id = expect(Tok::Ident, "register operand");
        Operand op{id.text, std::nullopt, id.line};
        if (peek_symbol("[")) {
            next();
            op.index = expect_index();
            expect_symbol("]");
        }
        return op;
    }

    std::vector<Operand> operand_list() {
        std::vector<Operand> ops{operand()};
        while (peek_symbol(",")) {
            next();
            ops.push_back(operand());
        }
        return ops;
    }

    /// Resolve to flat indices; a bare register expands to all of its bits.
    std::vector<std::size_t> resolve(const Operand &op, bool quantum) const {
        const auto &regs = quantum ? qregs_ : cregs_;
        const auto it = regs.find(op.reg);
        if (it == regs.end()) {
            throw SyntaxError(std::string(quantum ? "unknown quantum register '"
                                                  : "unknown classical register '") +
                                  op.reg + "'",
                              op.line);
        }
        const auto &r = it->second;
        if (op.index) {
            if (*op.index >= r.size) {
                throw IndexError("line " + std::to_string(op.line) + ": " + op.reg + "[" +
                                 std::to_string(*op.index) + "] out of bounds for size " +
                                 std::to_string(r.size));
            }
            return {r.offset + *op.index};
        }
        std::vector<std::size_t> all(r.size);
        for (std::size_t i = 0; i < r.size; ++i) {
            all[i] = r.offset + i;
        }
        return all;
    }

    /// Expand register broadcasting into per-index operand tuples.
    std::vector<std::vector<std::size_t>> broadcast(const std::vector<Operand> &ops,
                                                    int line) const {
        std::vector<std::vector<std::size_t>> cols;
        std::size_t width = 1;
        for (const auto &op : ops) {
            cols.push_back(resolve(op, true));
            if (!op.index) {
                if (width != 1 && cols.back().size() != width) {
                    throw SyntaxError("register sizes differ in broadcast", line);
                }
                width = cols.back().size();
            }
        }
        std::vector<std::vector<std::size_t>> rows(width);
        for (std::size_t i = 0; i < width; ++i) {
            for (const auto &c : cols) {
                rows[i].push_back(c.size() == 1 ? c[0] : c[i]);
            }
        }
        return rows;
    }

    void measure() {
        const int line = next().line;
        const auto src = operand();
        if (peek().kind != Tok::Arrow) {
            throw SyntaxError("expected '->' in measure", peek().line);
        }
        next();
        const auto dst = operand();
        expect_symbol(";");
        const auto q = resolve(src, true);
        const auto c = resolve(dst, false);
        if (q.size() != c.size()) {
            throw SyntaxError("measure register sizes differ", line);
        }
        for (std::size_t i = 0; i < q.size(); ++i) {
            emit(Instruction{GateKind::MEASURE, {q[i]}, {}, c[i]}, line);
        }
    }

    void barrier() {
        const int line = next().line;
        const auto ops = operand_list();
        expect_symbol(";");
        std::vector<std::size_t> qs;
        for (const auto &op : ops) {
            for (auto q : resolve(op, true)) {
                qs.push_back(q);
            }
        }
        emit(Instruction{GateKind::BARRIER, std::move(qs), {}, std::nullopt}, line);
    }

    std::vector<Expr> param_list() {
        std::vector<Expr> params;
        if (!peek_symbol("(")) {
            return params;
        }
        next();
        if (!peek_symbol(")")) {
            params.push_back(expression());
            while (peek_symbol(",")) {
                next();
                params.push_back(expression());
            }
        }
        expect_symbol(")");
        return params;
    }

    void gate_call() {
        const auto &id = next();
        const auto params = param_list();
        const auto ops = operand_list();
        expect_symbol(";");
        std::vector<double> values;
        for (const auto &p : params) {
            values.push_back(p.eval({}));
        }
        for (const auto &qubits : broadcast(ops, id.line)) {
            apply(id.text, values, qubits, id.line, 0);
        }
    }

    /// Emit a primitive or inline a macro.
    void apply(const std::string &name, const std::vector<double> &params,
               const std::vector<std::size_t> &qubits, int line, int depth) {
        if (const auto kind = primitive(name)) {
            if (qubits.size() != gate_arity(*kind)) {
                throw SyntaxError(name + " expects " + std::to_string(gate_arity(*kind)) +
                                      " qubit operand(s)",
                                  line);
            }
            if (params.size() != gate_param_count(*kind)) {
                throw SyntaxError(name + " expects " + std::to_string(gate_param_count(*kind)) +
                                      " parameter(s)",
                                  line);
            }
            emit(Instruction{*kind, qubits, params, std::nullopt}, line);
            return;
        }
        const auto it = macros_.find(name);
        if (it == macros_.end()) {
            throw UnsupportedGate("line " + std::to_string(line) + ": gate '" + name +
                                  "' is not supported");
        }
        const Macro &m = it->second;
        if (params.size() != m.params.size() || qubits.size() != m.qargs.size()) {
            throw SyntaxError("gate '" + name + "' called with the wrong number of arguments",
                              line);
        }
        std::map<std::string, double> env;
        for (std::size_t i = 0; i < params.size(); ++i) {
            env[m.params[i]] = params[i];
        }
        for (const auto &call : m.body) {
            std::vector<double> vals;
            for (const auto &e : call.params) {
                vals.push_back(e.eval(env));
            }
            std::vector<std::size_t> qs;
            for (const auto &a : call.qargs) {
                for (std::size_t i = 0; i < m.qargs.size(); ++i) {
                    if (m.qargs[i] == a) {
                        qs.push_back(qubits[i]);
                    }
                }
            }
            if (call.name == "barrier") {
                emit(Instruction{GateKind::BARRIER, qs, {}, std::nullopt}, line);
            } else {
                apply(call.name, vals, qs, line, depth + 1);
            }
        }
    }

    void gate_definition() {
        next();
        const auto &id = expect(Tok::Ident, "gate name");
        if (primitive(id.text) || macros_.count(id.text) || id.text == "measure" ||
            id.text == "barrier") {
            throw SyntaxError("gate '" + id.text + "' is already defined", id.line);
        }
        Macro m;
        if (peek_symbol("(")) {
            next();
            if (!peek_symbol(")")) {
                m.params.push_back(expect(Tok::Ident, "parameter name").text);
                while (peek_symbol(",")) {
                    next();
                    m.params.push_back(expect(Tok::Ident, "parameter name").text);
                }
            }
            expect_symbol(")");
        }
        m.qargs.push_back(expect(Tok::Ident, "qubit argument").text);
        while (peek_symbol(",")) {
            next();
            m.qargs.push_back(expect(Tok::Ident, "qubit argument").text);
        }
        expect_symbol("{");
        while (!peek_symbol("}")) {
            const auto &call = expect(Tok::Ident, "gate in body");
            if (call.text == id.text) {
                throw SyntaxError("recursive gate definition '" + id.text + "'", call.line);
            }
            BodyCall bc{call.text, {}, {}, call.line};
            if (call.text != "barrier") {
                if (!primitive(call.text) && !macros_.count(call.text)) {
                    throw UnsupportedGate("line " + std::to_string(call.line) + ": gate '" +
                                          call.text + "' is not supported");
                }
                bc.params = param_list();
            }
            bc.qargs.push_back(expect(Tok::Ident, "qubit argument").text);
            while (peek_symbol(",")) {
                next();
                bc.qargs.push_back(expect(Tok::Ident, "qubit argument").text);
            }
            expect_symbol(";");
            for (const auto &a : bc.qargs) {
                if (std::find(m.qargs.begin(), m.qargs.end(), a) == m.qargs.end()) {
                    throw SyntaxError("unknown qubit argument '" + a + "' in gate body",
                                      call.line);
                }
            }
            for (const auto &e : bc.params) {
                check_params(e, m.params);
            }
            m.body.push_back(std::move(bc));
        }
        expect_symbol("}");
        macros_[id.text] = std::move(m);
    }

    static void check_params(const Expr &e, const std::vector<std::string> &names) {
        if (e.op == Expr::Op::Param &&
            std::find(names.begin(), names.end(), e.name) == names.end()) {
            throw SyntaxError("unknown parameter '" + e.name + "'", e.line);
        }
        for (const auto &a : e.args) {
            check_params(a, names);
        }
    }

    // -- expressions (precedence climbing)
    Expr expression() { return additive(); }

    Expr additive() {
        Expr lhs = multiplicative();
        while (peek_symbol("+") || peek_symbol("-")) {
            const auto &op = next();
            Expr node{op.text == "+" ? Expr::Op::Add : Expr::Op::Sub, 0.0, {}, {}, op.line};
            node.args.push_back(std::move(lhs));
            node.args.push_back(multiplicative());
            lhs = std::move(node);
        }
        return lhs;
    }

    Expr multiplicative() {
        Expr lhs = unary();
        while (peek_symbol("*") || peek_symbol("/")) {
            const auto &op = next();
            Expr node{op.text == "*" ? Expr::Op::Mul : Expr::Op::Div, 0.0, {}, {}, op.line};
            node.args.push_back(std::move(lhs));
            node.args.push_back(unary());
            lhs = std::move(node);
        }
        return lhs;
    }

    Expr unary() {
        if (peek_symbol("-")) {
            const int line = next().line;
            Expr node{Expr::Op::Neg, 0.0, {}, {}, line};
            node.args.push_back(unary());
            return node;
        }
        if (peek_symbol("+")) {
            next();
            return unary();
        }
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (peek_symbol("^")) {
            const int line = next().line;
            Expr node{Expr::Op::Pow, 0.0, {}, {}, line};
            node.args.push_back(std::move(base));
            node.args.push_back(unary());
            return node;
        }
        return base;
    }

    Expr primary() {
        const auto &t = peek();
        if (t.kind == Tok::Number) {
            next();
            return Expr{Expr::Op::Num, t.number, {}, {}, t.line};
        }
        if (t.kind == Tok::Ident) {
            next();
            if (t.text == "pi") {
                return Expr{Expr::Op::Num, std::numbers::pi, {}, {}, t.line};
            }
            if (peek_symbol("(")) {
                next();
                Expr node{Expr::Op::Call, 0.0, t.text, {}, t.line};
                node.args.push_back(expression());
                expect_symbol(")");
                return node;
            }
            return Expr{Expr::Op::Param, 0.0, t.text, {}, t.line};
        }
        if (peek_symbol("(")) {
            next();
            Expr e = expression();
            expect_symbol(")");
            return e;
        }
        throw SyntaxError("expected an expression but found '" + t.text + "'", t.line);
    }

    void emit(Instruction inst, int line) { instructions_.emplace_back(std::move(inst), line); }

    std::vector<Token> toks_;
    std::size_t pos_{0};
    std::map<std::string, Register> qregs_;
    std::map<std::string, Register> cregs_;
    std::size_t qubits_{0};
    std::size_t clbits_{0};
    std::map<std::string, Macro> macros_;
    std::vector<std::pair<Instruction, int>> instructions_;
};

} // namespace

Circuit parse_qasm(std::string_view source, std::string name) {
    return Parser(Lexer(source).run()).run(std::move(name));
}

Circuit load_qasm(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_qasm(ss.str(), path.stem().string());
}

std::string to_qasm(const Circuit &circuit) {
    std::ostringstream out;
    out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    out << "qreg q[" << circuit.num_qubits() << "];\n";
    if (circuit.num_clbits() > 0) {
        out << "creg c[" << circuit.num_clbits() << "];\n";
    }
    for (const auto &inst : circuit.instructions()) {
        if (inst.kind == GateKind::MEASURE) {
            out << "measure q[" << inst.qubits[0] << "] -> c[" << *inst.clbit << "];\n";
            continue;
        }
        if (inst.kind == GateKind::BARRIER && inst.qubits.empty()) {
            out << "barrier q;\n";
            continue;
        }
        out << gate_name(inst.kind);
        if (!inst.params.empty()) {
            out << '(';
            for (std::size_t i = 0; i < inst.params.size(); ++i) {
                char buf[32];
                const auto res = std::to_chars(buf, buf + sizeof buf, inst.params[i]);
                out << (i ? "," : "") << std::string_view(buf, res.ptr - buf);
            }
            out << ')';
        }
        for (std::size_t i = 0; i < inst.qubits.size(); ++i) {
            out << (i ? "," : " ") << "q[" << inst.qubits[i] << ']';
        }
        out << ";\n";
    }
    return out.str();
}

} // namespace qtamper
