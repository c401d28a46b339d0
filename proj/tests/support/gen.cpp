#include "gen.hpp"

#include <map>

namespace gen {

using tqa::Cell;
using tqa::plan::Call;
using tqa::plan::Expr;
using tqa::plan::Literal;
using tqa::plan::Ref;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

bool chance(Rng& rng, double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

const std::vector<std::string> kNames = {"Edad", "Mes de realización", "Partido", "Voto", "Provincia",
                                         "Sexo", "Ingresos", "Escala", "Opinión"};
const std::vector<std::string> kNumeric = {"1", "2", "3", "18", "25", "65", "70", "-4", "2.5", "3,5", "100", "0"};
const std::vector<std::string> kMixed = {"5", "6", "7", "1 - No le votaría nunca", "10 - Le votaría siempre",
                                         "+65", "18-24", "NS/NC", "3,5 puntos"};
const std::vector<std::string> kCategorical = {
    "Enero",  "Febrero", "Marzo", "enero viejo", "PP (Partido Popular)", "Partido Popular", "PSOE",
    "Madrid", "Árbol",   "ÑANDÚ", "a;b",         "x, y",                 "p|q",             "a; ;b",
    "Otro",   "ENERO",   "Item",  "items"};
const std::vector<std::string> kBoolean = {"sí", "no", "Si", "NO", "true", "yes", "False"};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string random_csv(Rng& rng, int max_rows, int max_cols) {
  const int cols = uniform(rng, 1, max_cols);
  const int rows = uniform(rng, 0, max_rows);
  std::vector<std::string> names = kNames;
  std::shuffle(names.begin(), names.end(), rng);
  std::vector<const std::vector<std::string>*> pools;
  for (int c = 0; c < cols; ++c) {
    const int k = uniform(rng, 0, 3);
    pools.push_back(k == 0 ? &kNumeric : k == 1 ? &kMixed : k == 2 ? &kCategorical : &kBoolean);
  }
  std::string csv;
  for (int c = 0; c < cols; ++c) csv += (c ? "," : "") + quote(names[static_cast<std::size_t>(c)]);
  csv += "\n";
  const double missing = chance(rng, 0.2) ? 0.9 : 0.2;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) csv += ",";
      if (!chance(rng, missing)) csv += quote(pick(rng, *pools[static_cast<std::size_t>(c)]));
    }
    csv += "\n";
  }
  return csv;
}

tqa::Table random_table(Rng& rng, int max_rows, int max_cols) {
  return tqa::parse_csv(random_csv(rng, max_rows, max_cols), "random");
}

Cell query_value(Rng& rng, const tqa::Table& t, std::size_t col) {
  const auto& cells = t.columns()[col].cells;
  switch (uniform(rng, 0, 6)) {
    case 0:
      return Cell();
    case 1:
      return Cell(static_cast<double>(uniform(rng, -5, 100)));
    case 2:
      return Cell(pick(rng, kCategorical));
    case 3:
      return Cell(pick(rng, kMixed));
    default:
      break;
  }
  if (cells.empty()) return Cell(pick(rng, kBoolean));
  Cell stored = pick(rng, cells);
  if (!stored.is_text()) return stored;
  std::string s = stored.text();
  switch (uniform(rng, 0, 3)) {
    case 0: {
      for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      break;
    }
    case 1:
      if (s.size() > 2 && static_cast<unsigned char>(s[1]) < 0x80) s.erase(1, 1);
      break;
    case 2:
      s = s.substr(0, std::max<std::size_t>(1, s.size() / 2));
      if (static_cast<unsigned char>(s.back()) >= 0x80) s.pop_back();
      break;
    default:
      break;
  }
  return Cell(s);
}

std::string column_arg(Rng& rng, const tqa::Table& t, std::size_t col) {
  std::string name = t.columns()[col].name;
  if (chance(rng, 0.8) || name.size() < 3) return name;
  const auto pos = static_cast<std::size_t>(uniform(rng, 1, static_cast<int>(name.size()) - 1));
  if (static_cast<unsigned char>(name[pos]) >= 0x80 || static_cast<unsigned char>(name[pos - 1]) >= 0x80) return name;
  name[pos] = name[pos] == 'x' ? 'y' : 'x';
  return name;
}

std::string random_text(Rng& rng, std::size_t max_len) {
  static const std::vector<std::string> alphabet = {"a", "b", "E", "z", " ", "\"", "\\", "\n", "\t", "'",
                                                    "#", ",", "(", ")", "=", "á", "ñ", "Ü", "0", "7"};
  std::string s;
  const auto n = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(max_len)));
  for (std::size_t i = 0; i < n; ++i) s += pick(rng, alphabet);
  return s;
}

namespace {

enum class Ty { Table, List, Number, Boolean, Scalar };

struct PlanGen {
  Rng& rng;
  const std::vector<std::string>& schema;
  std::map<Ty, std::vector<std::string>> vars;

  static Expr call(std::string fn, std::vector<Expr> args) { return Expr{Call{std::move(fn), std::move(args)}, {}}; }
  static Expr lit(Cell c) { return Expr{Literal{std::move(c)}, {}}; }
  static Expr ref(std::string n) { return Expr{Ref{std::move(n)}, {}}; }

  Expr column() { return lit(Cell(pick(rng, schema))); }
  Expr integer() { return lit(Cell(uniform(rng, 0, 6))); }

  Cell scalar_literal() {
    switch (uniform(rng, 0, 4)) {
      case 0:
        return Cell(random_text(rng, 8));
      case 1:
        return Cell(std::uniform_real_distribution<double>(-1000, 1000)(rng));
      case 2:
        return Cell(uniform(rng, -20, 20));
      case 3:
        return Cell(chance(rng, 0.5));
      default:
        return Cell(pick(rng, kCategorical));
    }
  }

  Expr value(int depth) {
    if (chance(rng, 0.7)) return chance(rng, 0.1) ? lit(Cell()) : lit(scalar_literal());
    return expr(Ty::Scalar, depth);
  }

  Expr list_literal() {
    std::vector<Cell> items;
    const int n = uniform(rng, 0, 4);
    for (int i = 0; i < n; ++i) items.push_back(chance(rng, 0.1) ? Cell() : scalar_literal());
    return Expr{Literal{items}, {}};
  }

  Expr expr(Ty ty, int depth) {
    auto& pool = vars[ty];
    if (!pool.empty() && chance(rng, 0.3)) return ref(pick(rng, pool));
    const bool leaf = depth <= 0;
    switch (ty) {
      case Ty::Table: {
        if (leaf || chance(rng, 0.3)) return ref("df");
        auto t = expr(Ty::Table, depth - 1);
        switch (uniform(rng, 0, 9)) {
          case 0:
            return call("filter_contains", {t, column(), value(depth - 1)});
          case 1:
            return call("filter_not_contains", {t, column(), value(depth - 1)});
          case 2:
            return call("delete_rows_by_column_value", {t, column(), value(depth - 1)});
          case 3:
            return call("sort_alphabetical", {t, column()});
          case 4:
            return call("top_n_non_missing", {t, column(), integer()});
          case 5:
            return call("tail_n_non_missing", {t, column(), integer()});
          case 6:
            return call("flatten_column_values", {t, column()});
          case 7:
            return call("filter_ge", {t, column(), expr(Ty::Number, depth - 1)});
          case 8:
            return call("filter_lt", {t, column(), expr(Ty::Number, 0)});
          default:
            return call("filter_gt", {t, column(), lit(Cell(uniform(rng, 0, 50)))});
        }
      }
      case Ty::List: {
        if (leaf) return list_literal();
        switch (uniform(rng, 0, 6)) {
          case 0:
            return call("column", {expr(Ty::Table, depth - 1), column()});
          case 1:
            return call("unique", {expr(Ty::List, depth - 1)});
          case 2:
            return call("head_n", {expr(Ty::List, depth - 1), integer()});
          case 3:
            return call("sort_asc", {expr(Ty::List, depth - 1)});
          case 4:
            return call("sort_desc", {expr(Ty::List, depth - 1)});
          case 5:
            return call("most_frequent_n", {expr(Ty::Table, depth - 1), column(), lit(Cell(uniform(rng, 1, 4)))});
          default:
            return list_literal();
        }
      }
      case Ty::Number: {
        if (leaf) return lit(Cell(uniform(rng, -10, 100)));
        switch (uniform(rng, 0, 10)) {
          case 0:
            return call("count_rows", {expr(Ty::Table, depth - 1)});
          case 1:
            return call("length", {expr(Ty::List, depth - 1)});
          case 2:
            return call("count_equal", {expr(Ty::Table, depth - 1), column(), value(depth - 1)});
          case 3:
            return call("count_containing", {expr(Ty::Table, depth - 1), column(), value(depth - 1)});
          case 4:
            return call("sum", {expr(Ty::List, depth - 1)});
          case 5:
            return call(pick(rng, std::vector<std::string>{"add", "sub", "mul", "div"}),
                        {expr(Ty::Number, depth - 1), expr(Ty::Number, depth - 1)});
          case 6:
            return call("to_number", {expr(Ty::Scalar, depth - 1)});
          case 7:
            return call(pick(rng, std::vector<std::string>{"mean", "min_of", "max_of"}), {expr(Ty::List, depth - 1)});
          default:
            return lit(Cell(std::uniform_real_distribution<double>(-50, 50)(rng)));
        }
      }
      case Ty::Boolean: {
        if (leaf) return lit(Cell(chance(rng, 0.5)));
        switch (uniform(rng, 0, 3)) {
          case 0:
            return call("exists_value", {expr(Ty::Table, depth - 1), column(), value(depth - 1)});
          case 1:
            return call(pick(rng, std::vector<std::string>{"gt", "ge", "lt", "le", "eq"}),
                        {expr(Ty::Scalar, depth - 1), expr(Ty::Scalar, depth - 1)});
          case 2:
            return call("not_", {expr(Ty::Boolean, depth - 1)});
          default:
            return lit(Cell(chance(rng, 0.5)));
        }
      }
      case Ty::Scalar: {
        if (leaf) return lit(scalar_literal());
        switch (uniform(rng, 0, 5)) {
          case 0:
            return call("most_frequent", {expr(Ty::Table, depth - 1), column()});
          case 1:
            return call("first", {expr(Ty::List, depth - 1)});
          case 2:
            return expr(Ty::Number, depth - 1);
          case 3:
            return expr(Ty::Boolean, depth - 1);
          case 4:
            return call("most_frequent_in_subset", {expr(Ty::Table, depth - 1), column(), column(), value(depth - 1)});
          default:
            return lit(scalar_literal());
        }
      }
    }
    return ref("df");
  }
};

}  // namespace

tqa::plan::Plan random_plan(Rng& rng, const std::vector<std::string>& schema) {
  PlanGen g{rng, schema, {}};
  g.vars[Ty::Table].push_back("df");
  tqa::plan::Plan p;
  const int bindings = uniform(rng, 0, 5);
  const std::vector<Ty> types = {Ty::Table, Ty::List, Ty::Number, Ty::Boolean, Ty::Scalar};
  for (int i = 0; i < bindings; ++i) {
    const Ty ty = pick(rng, types);
    std::string name = "v" + std::to_string(i);
    if (chance(rng, 0.3)) name += "_x";
    p.bindings.push_back({name, g.expr(ty, uniform(rng, 0, 3)), {}});
    g.vars[ty].push_back(name);
  }
  p.answer = g.expr(pick(rng, types), uniform(rng, 0, 3));
  return p;
}

}  // namespace gen
