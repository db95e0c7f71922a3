#include "fpplab/cylinder_event.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "fpplab/errors.hpp"
#include "fpplab/passage_time.hpp"

namespace fpplab {

struct CylinderEvent::Node {
    enum class Kind { True, False, EdgeCmp, BallCmp, And, Or, Not } kind;
    Edge edge{Vertex{0, 0}, Direction::East};
    int K = 0;
    Cmp cmp = Cmp::Ge;
    Rational value;
    double value_d = 0.0;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const CylinderEvent::Node>;
using Kind = CylinderEvent::Node::Kind;

template <class W>
bool compare(const W& a, Cmp c, const W& b) {
    switch (c) {
        case Cmp::Ge: return a >= b;
        case Cmp::Gt: return a > b;
        case Cmp::Le: return a <= b;
        case Cmp::Lt: return a < b;
        case Cmp::Eq: return a == b;
        case Cmp::Ne: return a != b;
    }
    return false;
}

const char* cmp_text(Cmp c) {
    switch (c) {
        case Cmp::Ge: return ">=";
        case Cmp::Gt: return ">";
        case Cmp::Le: return "<=";
        case Cmp::Lt: return "<";
        case Cmp::Eq: return "==";
        case Cmp::Ne: return "!=";
    }
    return "?";
}

template <class W>
bool eval(const NodePtr& n, const WeightConfig<W>& config) {
    switch (n->kind) {
        case Kind::True: return true;
        case Kind::False: return false;
        case Kind::EdgeCmp: {
            if (!config.region().contains(n->edge)) throw ValidationError("event edge outside configuration region");
            if constexpr (std::is_same_v<W, double>) return compare(config.at(n->edge), n->cmp, n->value_d);
            else return compare(config.at(n->edge), n->cmp, n->value);
        }
        case Kind::BallCmp: {
            if (n->K > config.region().n) throw ValidationError("event ball exceeds configuration region");
            W t = t_to_boundary(config, n->K);
            if constexpr (std::is_same_v<W, double>) return compare(t, n->cmp, n->value_d);
            else return compare(t, n->cmp, n->value);
        }
        case Kind::And: return eval(n->lhs, config) && eval(n->rhs, config);
        case Kind::Or: return eval(n->lhs, config) || eval(n->rhs, config);
        case Kind::Not: return !eval(n->lhs, config);
    }
    return false;
}

void collect(const NodePtr& n, std::set<Edge>& out) {
    switch (n->kind) {
        case Kind::EdgeCmp: out.insert(n->edge); break;
        case Kind::BallCmp:
            for (const Edge& e : enumerate_edges(Box{n->K})) {
                if (sup_norm(e.lo()) < n->K || sup_norm(e.hi()) < n->K) out.insert(e);
            }
            break;
        case Kind::And:
        case Kind::Or:
            collect(n->lhs, out);
            collect(n->rhs, out);
            break;
        case Kind::Not: collect(n->lhs, out); break;
        default: break;
    }
}

int radius_of(const NodePtr& n) {
    switch (n->kind) {
        case Kind::EdgeCmp: return std::max(sup_norm(n->edge.lo()), sup_norm(n->edge.hi()));
        case Kind::BallCmp: return n->K;
        case Kind::And:
        case Kind::Or: return std::max(radius_of(n->lhs), radius_of(n->rhs));
        case Kind::Not: return radius_of(n->lhs);
        default: return 0;
    }
}

std::string render(const NodePtr& n) {
    switch (n->kind) {
        case Kind::True: return "true";
        case Kind::False: return "false";
        case Kind::EdgeCmp:
            return "edge(" + std::to_string(n->edge.lo().x) + "," + std::to_string(n->edge.lo().y) + "," +
                   direction_code(n->edge.direction()) + ") " + cmp_text(n->cmp) + " " + fpplab::to_string(n->value);
        case Kind::BallCmp:
            return "ball(" + std::to_string(n->K) + ") " + cmp_text(n->cmp) + " " + fpplab::to_string(n->value);
        case Kind::And: return "(" + render(n->lhs) + " and " + render(n->rhs) + ")";
        case Kind::Or: return "(" + render(n->lhs) + " or " + render(n->rhs) + ")";
        case Kind::Not: return "not " + render(n->lhs);
    }
    return "?";
}

NodePtr make(Kind k, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<CylinderEvent::Node>();
    n->kind = k;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    NodePtr parse_all() {
        NodePtr n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("event parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool word(std::string_view w) {
        skip();
        if (s_.substr(pos_, w.size()) != w) return false;
        std::size_t end = pos_ + w.size();
        if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
        pos_ = end;
        return true;
    }

    bool symbol(std::string_view w) {
        skip();
        if (s_.substr(pos_, w.size()) != w) return false;
        pos_ += w.size();
        return true;
    }

    void expect(std::string_view w) {
        if (!symbol(w)) fail("expected '" + std::string(w) + "'");
    }

    NodePtr expr() {
        NodePtr n = term();
        while (word("or")) n = make(Kind::Or, n, term());
        return n;
    }

    NodePtr term() {
        NodePtr n = factor();
        while (word("and")) n = make(Kind::And, n, factor());
        return n;
    }

    NodePtr factor() {
        if (word("not")) return make(Kind::Not, factor());
        if (symbol("(")) {
            NodePtr n = expr();
            expect(")");
            return n;
        }
        if (word("true")) return make(Kind::True);
        if (word("false")) return make(Kind::False);
        if (word("edge")) {
            expect("(");
            int x = integer();
            expect(",");
            int y = integer();
            expect(",");
            skip();
            bool quoted = symbol("\"");
            skip();
            Direction d;
            if (symbol("E")) d = Direction::East;
            else if (symbol("N")) d = Direction::North;
            else fail("expected direction E or N");
            if (quoted) expect("\"");
            expect(")");
            auto n = std::make_shared<CylinderEvent::Node>();
            n->kind = Kind::EdgeCmp;
            n->edge = Edge(Vertex{x, y}, d);
            n->cmp = comparison();
            n->value = number();
            n->value_d = to_double(n->value);
            return n;
        }
        if (word("ball")) {
            expect("(");
            int K = integer();
            if (K < 0) fail("ball radius must be nonnegative");
            expect(")");
            auto n = std::make_shared<CylinderEvent::Node>();
            n->kind = Kind::BallCmp;
            n->K = K;
            n->cmp = comparison();
            n->value = number();
            n->value_d = to_double(n->value);
            return n;
        }
        fail("expected an event");
    }

    Cmp comparison() {
        if (symbol(">=")) return Cmp::Ge;
        if (symbol("<=")) return Cmp::Le;
        if (symbol("==")) return Cmp::Eq;
        if (symbol("!=")) return Cmp::Ne;
        if (symbol(">")) return Cmp::Gt;
        if (symbol("<")) return Cmp::Lt;
        fail("expected a comparison operator");
    }

    int integer() {
        skip();
        std::size_t start = pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start || !std::isdigit(static_cast<unsigned char>(s_[pos_ - 1]))) fail("expected an integer");
        return std::stoi(std::string(s_.substr(start, pos_ - start)));
    }

    Rational number() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                    s_[pos_] == '/' || s_[pos_] == '-' || s_[pos_] == '+')) {
            ++pos_;
        }
        if (pos_ == start) fail("expected a number");
        try {
            return parse_rational(s_.substr(start, pos_ - start));
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

CylinderEvent CylinderEvent::parse(std::string_view text) { return CylinderEvent(Parser(text).parse_all()); }
CylinderEvent CylinderEvent::sure() { return CylinderEvent(make(Kind::True)); }
CylinderEvent CylinderEvent::null() { return CylinderEvent(make(Kind::False)); }

CylinderEvent CylinderEvent::edge(Edge e, Cmp cmp, const Rational& value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::EdgeCmp;
    n->edge = e;
    n->cmp = cmp;
    n->value = value;
    n->value_d = to_double(value);
    return CylinderEvent(n);
}

CylinderEvent CylinderEvent::ball(int K, Cmp cmp, const Rational& value) {
    if (K < 0) throw ValidationError("ball radius must be nonnegative");
    auto n = std::make_shared<Node>();
    n->kind = Kind::BallCmp;
    n->K = K;
    n->cmp = cmp;
    n->value = value;
    n->value_d = to_double(value);
    return CylinderEvent(n);
}

CylinderEvent CylinderEvent::operator&&(const CylinderEvent& o) const { return CylinderEvent(make(Kind::And, root_, o.root_)); }
CylinderEvent CylinderEvent::operator||(const CylinderEvent& o) const { return CylinderEvent(make(Kind::Or, root_, o.root_)); }
CylinderEvent CylinderEvent::operator!() const { return CylinderEvent(make(Kind::Not, root_)); }

bool CylinderEvent::evaluate(const WeightConfig<double>& config) const { return eval(root_, config); }
bool CylinderEvent::evaluate(const WeightConfig<Rational>& config) const { return eval(root_, config); }

std::vector<Edge> CylinderEvent::support() const {
    std::set<Edge> s;
    collect(root_, s);
    return {s.begin(), s.end()};
}

int CylinderEvent::radius() const { return radius_of(root_); }

std::string CylinderEvent::to_string() const { return render(root_); }

}  // namespace fpplab
