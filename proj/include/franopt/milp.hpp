#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace franopt {

enum class VarDomain { CONTINUOUS, BINARY };
enum class Sense { LE, EQ, GE };

/// One decision variable. The dense index is the identity; the name is a
/// diagnostic label only.
struct Variable {
    std::size_t index = 0;
    std::string name;
    VarDomain domain = VarDomain::CONTINUOUS;
    double lower = 0.0;
    double upper = 0.0;
};

/// Sparse linear expression: sum of coefficient * variable plus a constant.
struct LinearExpr {
    std::vector<std::pair<std::size_t, double>> terms;
    double constant = 0.0;

    void add(std::size_t var, double coeff) { terms.emplace_back(var, coeff); }
};

/// Merges duplicate indices, drops exact-zero coefficients, sorts by index.
/// Evaluation at any assignment is unchanged.
LinearExpr normalize(const LinearExpr& expr);

double evaluate(const LinearExpr& expr, const std::vector<double>& values);

struct Constraint {
    LinearExpr expr;
    Sense sense = Sense::LE;
    double rhs = 0.0;
    std::string name;
};

/// A minimization MILP over continuous and binary variables. Construction is
/// single-writer; a finished problem is immutable and freely shareable.
class MilpProblem {
  public:
    /// Appends a variable and returns its dense index. Binary variables are
    /// forced to bounds [0, 1]. Throws InvalidBounds when lower > upper.
    std::size_t add_variable(const std::string& name, VarDomain domain,
                             double lower = 0.0, double upper = 0.0);

    /// Clamps a variable to a single value (both bounds become `value`);
    /// used to rule assignments out before the search starts. Binary
    /// variables accept only exactly 0 or 1.
    void fix_variable(std::size_t index, double value);

    /// Stores the normalized constraint. Coefficients and rhs must be finite.
    void add_constraint(LinearExpr expr, Sense sense, double rhs,
                        const std::string& name = "");

    void set_objective(LinearExpr expr);

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return cons_; }
    const LinearExpr& objective() const { return objective_; }

    std::size_t num_binaries() const;

    /// Constraint violations of `values` beyond `tol`, plus bound and (for
    /// binaries) integrality violations beyond `int_tol`. Empty means feasible.
    std::vector<std::string> check_feasible(const std::vector<double>& values,
                                            double tol,
                                            double int_tol = 1e-6) const;

  private:
    std::vector<Variable> vars_;
    std::vector<Constraint> cons_;
    LinearExpr objective_;
};

/// Plain-text dump of the problem, LP style. Numbers carry 17 significant
/// digits so that parse_lp_text reproduces every coefficient bit for bit.
/// The exact grammar is documented in the README.
std::string to_lp_text(const MilpProblem& problem);

/// Parses the canonical dump produced by to_lp_text. Diagnostic names are
/// not restored; indices, domains, bounds, coefficients and senses are.
MilpProblem parse_lp_text(const std::string& text);

}  // namespace franopt
