#include "cfin/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace cfin {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, res.ptr);
    // Exponent markers always carry a sign, matching the grammar.
    auto epos = s.find('e');
    if (epos != std::string::npos && epos + 1 < s.size() && s[epos + 1] != '-' && s[epos + 1] != '+') {
        s.insert(epos + 1, "+");
    }
    return s;
}

namespace {

class Parser {
public:
    Parser(const std::string& src, int n) : src_(src), n_(n) {}

    Expr run() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& src_;
    int n_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }
    [[noreturn]] void fail_at(size_t at, const std::string& msg) const { throw ParseError(at, msg); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(uint8_t(src_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    Expr parse_expr() {
        Expr acc = parse_term();
        for (;;) {
            if (eat('+')) {
                acc = acc + parse_term();
            } else if (eat('-')) {
                acc = acc - parse_term();
            } else {
                return acc;
            }
        }
    }

    Expr parse_term() {
        Expr acc = parse_factor();
        for (;;) {
            if (eat('*')) {
                acc = acc * parse_factor();
            } else if (eat('/')) {
                size_t at = pos_;
                Expr den = parse_factor();
                try {
                    acc = acc / den;
                } catch (const ExprError& e) {
                    fail_at(at, e.what());
                }
            } else {
                return acc;
            }
        }
    }

    Expr parse_factor() {
        if (eat('-')) return -parse_factor();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (!eat('^')) return base;
        bool neg = false;
        bool paren = eat('(');
        if (eat('-')) neg = true;
        skip_ws();
        size_t at = pos_;
        auto [value, is_int, int_value, imag] = lex_number();
        if (imag) fail_at(at, "exponent must be real");
        if (paren && !eat(')')) fail("expected ')' after exponent");
        try {
            if (is_int) return pow(base, neg ? -int_value : int_value);
            return pow(base, neg ? -value : value);
        } catch (const ExprError& e) {
            fail_at(at, e.what());
        }
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(uint8_t(c)) || c == '.') {
            auto [value, is_int, int_value, imag] = lex_number();
            (void)is_int;
            (void)int_value;
            return Expr::constant(imag ? Complex(0.0, value) : Complex(value, 0.0));
        }
        if (std::isalpha(uint8_t(c))) return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr parse_ident() {
        size_t start = pos_;
        while (pos_ < src_.size() && std::isalpha(uint8_t(src_[pos_]))) ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        if (name == "exp" || name == "log" || name == "sqrt") {
            if (!eat('(')) fail("expected '(' after function name");
            Expr arg = parse_expr();
            if (!eat(')')) fail("expected ')'");
            try {
                if (name == "exp") return exp(arg);
                if (name == "log") return log(arg);
                return sqrt(arg);
            } catch (const ExprError& e) {
                fail_at(start, e.what());
            }
        }
        if (name == "i" && (pos_ >= src_.size() || !std::isdigit(uint8_t(src_[pos_])))) {
            return Expr::constant(Complex(0.0, 1.0));
        }
        VarKind kind;
        if (name == "z") kind = VarKind::Z;
        else if (name == "zb") kind = VarKind::ZBar;
        else if (name == "e") kind = VarKind::Eta;
        else if (name == "eb") kind = VarKind::EtaBar;
        else fail_at(start, "unknown identifier '" + name + "'");
        size_t dstart = pos_;
        while (pos_ < src_.size() && std::isdigit(uint8_t(src_[pos_]))) ++pos_;
        if (dstart == pos_) fail_at(start, "identifier '" + name + "' needs an index");
        int idx = 0;
        std::from_chars(src_.data() + dstart, src_.data() + pos_, idx);
        if (idx < 1 || idx > n_) {
            fail_at(start, "index " + std::to_string(idx) + " out of range for n=" + std::to_string(n_));
        }
        return Expr::variable({kind, idx});
    }

    struct NumberTok {
        double value;
        bool is_int;
        int int_value;
        bool imag;
    };

    NumberTok lex_number() {
        skip_ws();
        size_t start = pos_;
        bool saw_digit = false, saw_dot = false, saw_exp = false;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isdigit(uint8_t(c))) {
                saw_digit = true;
                ++pos_;
            } else if (c == '.' && !saw_dot && !saw_exp) {
                saw_dot = true;
                ++pos_;
            } else if ((c == 'e' || c == 'E') && saw_digit && !saw_exp && pos_ + 1 < src_.size() &&
                       (src_[pos_ + 1] == '+' || src_[pos_ + 1] == '-')) {
                saw_exp = true;
                pos_ += 2;
                if (pos_ >= src_.size() || !std::isdigit(uint8_t(src_[pos_]))) fail("malformed exponent");
            } else {
                break;
            }
        }
        if (!saw_digit) fail("expected a number");
        std::string text = src_.substr(start, pos_ - start);
        double value = 0.0;
        std::from_chars(text.data(), text.data() + text.size(), value);
        bool imag = false;
        if (pos_ < src_.size() && src_[pos_] == 'i' &&
            (pos_ + 1 >= src_.size() || !std::isalnum(uint8_t(src_[pos_ + 1])))) {
            imag = true;
            ++pos_;
        }
        bool is_int = !saw_dot && !saw_exp && value == std::floor(value) && std::abs(value) <= 2147483647.0;
        return {value, is_int && !imag, int(value), imag};
    }
};

// Precedence levels: sum=1, product/quotient=2, power=3, atom=4.
constexpr int kPrecSum = 1, kPrecTerm = 2, kPrecPow = 3, kPrecAtom = 4;

std::string print_constant(Complex c) {
    double re = c.real(), im = c.imag();
    if (im == 0.0) {
        if (re >= 0.0) return format_double(re);
        return "(-" + format_double(-re) + ")";
    }
    if (re == 0.0) {
        if (im >= 0.0) return format_double(im) + "i";
        return "(-" + format_double(-im) + "i)";
    }
    std::string s = "(" + format_double(re);
    s += im >= 0.0 ? "+" : "-";
    s += format_double(std::abs(im)) + "i)";
    return s;
}

std::string var_name(VarKind k, int index) {
    const char* prefix = "";
    switch (k) {
        case VarKind::Z: prefix = "z"; break;
        case VarKind::ZBar: prefix = "zb"; break;
        case VarKind::Eta: prefix = "e"; break;
        case VarKind::EtaBar: prefix = "eb"; break;
    }
    return prefix + std::to_string(index);
}

void print_rec(const ExprPool& pool, ExprId id, int parent_prec, std::string& out) {
    const ExprPool::Node& nd = pool.node(id);
    auto kids = pool.children(id);
    auto wrap = [&](int prec, auto&& body) {
        bool paren = prec < parent_prec;
        if (paren) out += '(';
        body();
        if (paren) out += ')';
    };
    switch (nd.kind) {
        case NodeKind::Constant:
            out += print_constant(nd.cval);
            break;
        case NodeKind::Variable:
            out += var_name(nd.vkind, nd.vindex);
            break;
        case NodeKind::Sum:
            wrap(kPrecSum, [&] {
                for (size_t i = 0; i < kids.size(); ++i) {
                    if (i) out += " + ";
                    print_rec(pool, kids[i], kPrecSum + 1, out);
                }
            });
            break;
        case NodeKind::Product:
            wrap(kPrecTerm, [&] {
                for (size_t i = 0; i < kids.size(); ++i) {
                    if (i) out += '*';
                    print_rec(pool, kids[i], kPrecTerm + 1, out);
                }
            });
            break;
        case NodeKind::Quotient:
            wrap(kPrecTerm, [&] {
                print_rec(pool, kids[0], kPrecTerm + 1, out);
                out += '/';
                print_rec(pool, kids[1], kPrecTerm + 1, out);
            });
            break;
        case NodeKind::IntPow:
            wrap(kPrecPow, [&] {
                print_rec(pool, kids[0], kPrecAtom, out);
                out += '^';
                if (nd.ipow < 0) {
                    out += "(-" + std::to_string(-int64_t(nd.ipow)) + ")";
                } else {
                    out += std::to_string(nd.ipow);
                }
            });
            break;
        case NodeKind::RealPow:
            wrap(kPrecPow, [&] {
                print_rec(pool, kids[0], kPrecAtom, out);
                out += '^';
                if (nd.rpow < 0.0) {
                    out += "(-" + format_double(-nd.rpow) + ")";
                } else {
                    out += format_double(nd.rpow);
                }
            });
            break;
        case NodeKind::Exp:
            out += "exp(";
            print_rec(pool, kids[0], kPrecSum, out);
            out += ')';
            break;
        case NodeKind::Log:
            out += "log(";
            print_rec(pool, kids[0], kPrecSum, out);
            out += ')';
            break;
        case NodeKind::Neg:
            wrap(kPrecTerm, [&] {
                out += '-';
                print_rec(pool, kids[0], kPrecAtom, out);
            });
            break;
    }
}

}  // namespace

Expr parse(const std::string& source, int n) { return Parser(source, n).run(); }

std::string print(Expr e) {
    std::string out;
    print_rec(ExprPool::instance(), e.id(), 0, out);
    return out;
}

}  // namespace cfin
