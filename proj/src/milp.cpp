#include "franopt/milp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "franopt/errors.hpp"

namespace franopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok, std::size_t line_no) {
    if (tok == "inf") return kInf;
    if (tok == "-inf") return -kInf;
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError("lp text line " + std::to_string(line_no) +
                         ": bad number '" + tok + "'");
    return v;
}

std::size_t parse_var(const std::string& tok, std::size_t line_no) {
    if (tok.size() < 2 || tok[0] != 'x')
        throw ParseError("lp text line " + std::to_string(line_no) +
                         ": expected variable, got '" + tok + "'");
    std::size_t idx = 0;
    auto res = std::from_chars(tok.data() + 1, tok.data() + tok.size(), idx);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError("lp text line " + std::to_string(line_no) +
                         ": bad variable '" + tok + "'");
    return idx;
}

}  // namespace

LinearExpr normalize(const LinearExpr& expr) {
    std::map<std::size_t, double> acc;
    for (const auto& [idx, coeff] : expr.terms) acc[idx] += coeff;
    LinearExpr out;
    out.constant = expr.constant;
    out.terms.reserve(acc.size());
    for (const auto& [idx, coeff] : acc)
        if (coeff != 0.0) out.terms.emplace_back(idx, coeff);
    return out;
}

double evaluate(const LinearExpr& expr, const std::vector<double>& values) {
    double s = expr.constant;
    for (const auto& [idx, coeff] : expr.terms) s += coeff * values.at(idx);
    return s;
}

std::size_t MilpProblem::add_variable(const std::string& name,
                                      VarDomain domain, double lower,
                                      double upper) {
    if (domain == VarDomain::BINARY) {
        lower = 0.0;
        upper = 1.0;
    }
    if (lower > upper)
        throw InvalidBounds("variable " + name + ": lower bound " +
                            fmt(lower) + " > upper bound " + fmt(upper));
    Variable v;
    v.index = vars_.size();
    v.name = name;
    v.domain = domain;
    v.lower = lower;
    v.upper = upper;
    vars_.push_back(std::move(v));
    return vars_.back().index;
}

void MilpProblem::fix_variable(std::size_t index, double value) {
    Variable& v = vars_.at(index);
    if (v.domain == VarDomain::BINARY && value != 0.0 && value != 1.0)
        throw InvalidBounds(
            "variable " +
            (v.name.empty() ? "x" + std::to_string(index) : v.name) +
            ": a binary can only be fixed to 0 or 1, got " + fmt(value));
    if (!std::isfinite(value))
        throw InvalidBounds(
            "variable " +
            (v.name.empty() ? "x" + std::to_string(index) : v.name) +
            ": fixed value must be finite");
    v.lower = value;
    v.upper = value;
}

void MilpProblem::add_constraint(LinearExpr expr, Sense sense, double rhs,
                                 const std::string& name) {
    if (!std::isfinite(rhs))
        throw Error("constraint " + name + ": rhs must be finite");
    LinearExpr n = normalize(expr);
    for (const auto& [idx, coeff] : n.terms) {
        if (idx >= vars_.size())
            throw Error("constraint " + name + ": unknown variable index " +
                        std::to_string(idx));
        if (!std::isfinite(coeff))
            throw Error("constraint " + name + ": non-finite coefficient");
    }
    Constraint c;
    c.expr = std::move(n);
    c.sense = sense;
    c.rhs = rhs;
    c.name = name;
    cons_.push_back(std::move(c));
}

void MilpProblem::set_objective(LinearExpr expr) {
    LinearExpr n = normalize(expr);
    for (const auto& [idx, coeff] : n.terms) {
        if (idx >= vars_.size())
            throw Error("objective: unknown variable index " +
                        std::to_string(idx));
        if (!std::isfinite(coeff))
            throw Error("objective: non-finite coefficient");
    }
    objective_ = std::move(n);
}

std::size_t MilpProblem::num_binaries() const {
    std::size_t n = 0;
    for (const auto& v : vars_)
        if (v.domain == VarDomain::BINARY) ++n;
    return n;
}

std::vector<std::string> MilpProblem::check_feasible(
    const std::vector<double>& values, double tol, double int_tol) const {
    std::vector<std::string> out;
    if (values.size() != vars_.size()) {
        out.push_back("value vector has size " +
                      std::to_string(values.size()) + ", expected " +
                      std::to_string(vars_.size()));
        return out;
    }
    for (const auto& v : vars_) {
        const double x = values[v.index];
        if (x < v.lower - tol || x > v.upper + tol)
            out.push_back("x" + std::to_string(v.index) + " = " + fmt(x) +
                          " outside bounds [" + fmt(v.lower) + ", " +
                          fmt(v.upper) + "]");
        if (v.domain == VarDomain::BINARY &&
            std::abs(x - std::round(x)) > int_tol)
            out.push_back("x" + std::to_string(v.index) + " = " + fmt(x) +
                          " not integral");
    }
    for (std::size_t i = 0; i < cons_.size(); ++i) {
        const auto& c = cons_[i];
        const double lhs = evaluate(c.expr, values);
        const double gap = lhs - c.rhs;
        bool bad = false;
        switch (c.sense) {
            case Sense::LE: bad = gap > tol; break;
            case Sense::GE: bad = gap < -tol; break;
            case Sense::EQ: bad = std::abs(gap) > tol; break;
        }
        if (bad)
            out.push_back("constraint " +
                          (c.name.empty() ? "c" + std::to_string(i) : c.name) +
                          " violated by " + fmt(std::abs(gap)));
    }
    return out;
}

std::string to_lp_text(const MilpProblem& problem) {
    std::ostringstream os;
    auto write_expr = [&os](const LinearExpr& e) {
        bool first = true;
        for (const auto& [idx, coeff] : e.terms) {
            if (!first) os << " + ";
            os << fmt(coeff) << " x" << idx;
            first = false;
        }
        if (e.constant != 0.0 || first) {
            if (!first) os << " + ";
            os << fmt(e.constant);
        }
    };

    os << "Minimize\n obj: ";
    write_expr(problem.objective());
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < problem.constraints().size(); ++i) {
        const auto& c = problem.constraints()[i];
        if (!c.name.empty()) os << "\\ " << c.name << "\n";
        os << " c" << i << ": ";
        write_expr(c.expr);
        switch (c.sense) {
            case Sense::LE: os << " <= "; break;
            case Sense::EQ: os << " = "; break;
            case Sense::GE: os << " >= "; break;
        }
        os << fmt(c.rhs) << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : problem.variables()) {
        if (!v.name.empty()) os << "\\ " << v.name << "\n";
        os << " " << fmt(v.lower) << " <= x" << v.index << " <= "
           << fmt(v.upper) << "\n";
    }
    os << "Binaries\n";
    for (const auto& v : problem.variables())
        if (v.domain == VarDomain::BINARY) os << " x" << v.index << "\n";
    os << "End\n";
    return os.str();
}

MilpProblem parse_lp_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;

    enum class Section { NONE, OBJECTIVE, CONSTRAINTS, BOUNDS, BINARIES, END };
    Section section = Section::NONE;

    struct RawCon {
        LinearExpr expr;
        Sense sense;
        double rhs;
    };
    LinearExpr objective;
    std::vector<RawCon> cons;
    std::vector<std::pair<double, double>> bounds;
    std::vector<std::size_t> binaries;

    auto tokenize = [](const std::string& s) {
        std::vector<std::string> toks;
        std::istringstream ts(s);
        std::string t;
        while (ts >> t) toks.push_back(t);
        return toks;
    };

    // Entry lines look like "label: term + term ... [<= | = | >=] rhs".
    auto parse_entry = [&](const std::vector<std::string>& toks,
                           std::size_t start, bool allow_sense, LinearExpr& e,
                           Sense& sense, double& rhs) -> bool {
        bool saw_sense = false;
        std::size_t i = start;
        while (i < toks.size()) {
            if (toks[i] == "+") {
                ++i;
                continue;
            }
            if (toks[i] == "<=" || toks[i] == "=" || toks[i] == ">=") {
                if (!allow_sense || i + 1 != toks.size() - 1)
                    throw ParseError("lp text line " +
                                     std::to_string(line_no) +
                                     ": misplaced sense token");
                sense = toks[i] == "<=" ? Sense::LE
                        : toks[i] == "=" ? Sense::EQ
                                         : Sense::GE;
                rhs = parse_double(toks[i + 1], line_no);
                saw_sense = true;
                break;
            }
            const double coeff = parse_double(toks[i], line_no);
            if (i + 1 < toks.size() && toks[i + 1][0] == 'x') {
                e.add(parse_var(toks[i + 1], line_no), coeff);
                i += 2;
            } else {
                e.constant += coeff;
                ++i;
            }
        }
        return saw_sense;
    };

    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '\\') continue;
        if (line == "Minimize") { section = Section::OBJECTIVE; continue; }
        if (line == "Subject To") { section = Section::CONSTRAINTS; continue; }
        if (line == "Bounds") { section = Section::BOUNDS; continue; }
        if (line == "Binaries") { section = Section::BINARIES; continue; }
        if (line == "End") { section = Section::END; continue; }

        auto toks = tokenize(line);
        if (toks.empty()) continue;
        switch (section) {
            case Section::OBJECTIVE: {
                Sense s;
                double rhs;
                parse_entry(toks, 1, false, objective, s, rhs);
                break;
            }
            case Section::CONSTRAINTS: {
                RawCon rc;
                rc.sense = Sense::LE;
                rc.rhs = 0.0;
                if (!parse_entry(toks, 1, true, rc.expr, rc.sense, rc.rhs))
                    throw ParseError("lp text line " + std::to_string(line_no) +
                                     ": constraint without sense");
                cons.push_back(std::move(rc));
                break;
            }
            case Section::BOUNDS: {
                // " lb <= xN <= ub"
                if (toks.size() != 5 || toks[1] != "<=" || toks[3] != "<=")
                    throw ParseError("lp text line " + std::to_string(line_no) +
                                     ": bad bounds line");
                const std::size_t idx = parse_var(toks[2], line_no);
                if (idx != bounds.size())
                    throw ParseError("lp text line " + std::to_string(line_no) +
                                     ": bounds out of order");
                bounds.emplace_back(parse_double(toks[0], line_no),
                                    parse_double(toks[4], line_no));
                break;
            }
            case Section::BINARIES:
                binaries.push_back(parse_var(toks[0], line_no));
                break;
            case Section::NONE:
            case Section::END:
                throw ParseError("lp text line " + std::to_string(line_no) +
                                 ": content outside any section");
        }
    }
    if (section != Section::END)
        throw ParseError("lp text: missing End marker");

    std::vector<char> is_binary(bounds.size(), 0);
    for (std::size_t idx : binaries) {
        if (idx >= bounds.size())
            throw ParseError("lp text: binary index out of range");
        is_binary[idx] = 1;
    }

    MilpProblem p;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        p.add_variable("", is_binary[i] ? VarDomain::BINARY
                                        : VarDomain::CONTINUOUS,
                       bounds[i].first, bounds[i].second);
        if (!is_binary[i]) continue;
        // add_variable normalizes binaries to [0, 1]; restore a fixed one.
        const auto [lo, hi] = bounds[i];
        if (lo == 0.0 && hi == 1.0) continue;
        if (lo == hi && (lo == 0.0 || lo == 1.0))
            p.fix_variable(i, lo);
        else
            throw ParseError("lp text: binary x" + std::to_string(i) +
                             " must have bounds [0, 1] or be fixed to 0 or 1");
    }
    for (auto& rc : cons)
        p.add_constraint(std::move(rc.expr), rc.sense, rc.rhs);
    p.set_objective(std::move(objective));
    return p;
}

}  // namespace franopt
