#include "tqa/planlang.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "tqa/fuzzy.hpp"
#include "tqa/reply.hpp"
#include "tqa/text.hpp"

namespace tqa::plan {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Parse:
      return "parse";
    case Stage::Validate:
      return "validate";
    case Stage::Execute:
      return "execute";
  }
  return "parse";
}

namespace {

std::string format_error(Stage stage, const std::string& message, int line, int column,
                         const std::string& builtin) {
  std::string out;
  switch (stage) {
    case Stage::Parse:
      out = "parse error";
      break;
    case Stage::Validate:
      out = "validation error";
      break;
    case Stage::Execute:
      out = "execution error";
      break;
  }
  if (!builtin.empty()) out += " in " + builtin;
  if (line > 0) {
    out += " at line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
  }
  return out + ": " + (message.empty() ? "unknown error" : message);
}

}  // namespace

PlanError::PlanError(Stage stage, std::string message, int line, int column, std::string builtin)
    : Error(format_error(stage, message, line, column, builtin)),
      stage_(stage),
      line_(line),
      column_(column),
      builtin_(std::move(builtin)),
      detail_(std::move(message)) {}

// --- equality ----------------------------------------------------------------

bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* ca = std::get_if<Call>(&a.node)) {
    const auto& cb = std::get<Call>(b.node);
    return ca->fn == cb.fn && ca->args == cb.args;
  }
  if (const auto* ra = std::get_if<Ref>(&a.node)) return ra->name == std::get<Ref>(b.node).name;
  return std::get<Literal>(a.node).value == std::get<Literal>(b.node).value;
}

bool operator==(const Plan& a, const Plan& b) {
  if (a.bindings.size() != b.bindings.size() || a.answer.has_value() != b.answer.has_value()) {
    return false;
  }
  for (std::size_t i = 0; i < a.bindings.size(); ++i) {
    if (a.bindings[i].name != b.bindings[i].name || !(a.bindings[i].expr == b.bindings[i].expr)) {
      return false;
    }
  }
  return !a.answer || *a.answer == *b.answer;
}

// --- lexer -------------------------------------------------------------------

namespace {

enum class Tok { Name, Number, String, LParen, RParen, LBracket, RBracket, Comma, Equals, Newline, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Name:
      return "a name";
    case Tok::Number:
      return "a number";
    case Tok::String:
      return "a string";
    case Tok::LParen:
      return "'('";
    case Tok::RParen:
      return "')'";
    case Tok::LBracket:
      return "'['";
    case Tok::RBracket:
      return "']'";
    case Tok::Comma:
      return "','";
    case Tok::Equals:
      return "'='";
    case Tok::Newline:
      return "end of line";
    case Tok::End:
      return "end of input";
  }
  return "token";
}

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    int depth = 0;
    while (i_ < src_.size()) {
      const char c = src_[i_];
      const SourcePos pos{line_, col_};
      if (c == '\n') {
        if (depth == 0) out.push_back({Tok::Newline, "", 0.0, pos});
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (c == '(' || c == '[') {
        ++depth;
        out.push_back({c == '(' ? Tok::LParen : Tok::LBracket, std::string(1, c), 0.0, pos});
        advance();
      } else if (c == ')' || c == ']') {
        depth = std::max(0, depth - 1);
        out.push_back({c == ')' ? Tok::RParen : Tok::RBracket, std::string(1, c), 0.0, pos});
        advance();
      } else if (c == ',') {
        out.push_back({Tok::Comma, ",", 0.0, pos});
        advance();
      } else if (c == '=') {
        out.push_back({Tok::Equals, "=", 0.0, pos});
        advance();
      } else if (c == '"' || c == '\'') {
        out.push_back(string_token(c, pos));
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 ((c == '-' || c == '+' || c == '.') && i_ + 1 < src_.size() &&
                  (std::isdigit(static_cast<unsigned char>(src_[i_ + 1])) || src_[i_ + 1] == '.'))) {
        out.push_back(number_token(pos));
      } else if (is_name_start(c)) {
        std::string name;
        while (i_ < src_.size() && is_name_char(src_[i_])) {
          name.push_back(src_[i_]);
          advance();
        }
        out.push_back({Tok::Name, std::move(name), 0.0, pos});
      } else {
        throw PlanError(Stage::Parse, "unexpected character '" + std::string(1, c) + "'", pos.line,
                        pos.column);
      }
    }
    out.push_back({Tok::Newline, "", 0.0, {line_, col_}});
    out.push_back({Tok::End, "", 0.0, {line_, col_}});
    return out;
  }

 private:
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(src_[i_]) & 0xC0) != 0x80) {
      ++col_;
    }
    ++i_;
  }

  Token string_token(char quote, SourcePos pos) {
    advance();
    std::string value;
    while (true) {
      if (i_ >= src_.size() || src_[i_] == '\n') {
        throw PlanError(Stage::Parse, "unterminated string literal", pos.line, pos.column);
      }
      const char c = src_[i_];
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\' && i_ + 1 < src_.size()) {
        advance();
        const char e = src_[i_];
        switch (e) {
          case 'n':
            value.push_back('\n');
            break;
          case 't':
            value.push_back('\t');
            break;
          case 'r':
            value.push_back('\r');
            break;
          default:
            value.push_back(e);
        }
        advance();
        continue;
      }
      value.push_back(c);
      advance();
    }
    return {Tok::String, std::move(value), 0.0, pos};
  }

  Token number_token(SourcePos pos) {
    const std::size_t start = i_;
    if (src_[i_] == '-' || src_[i_] == '+') advance();
    while (i_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.')) {
      advance();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t j = i_ + 1;
      if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
      if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
        while (i_ < j) advance();
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
      }
    }
    auto literal = std::string(src_.substr(start, i_ - start));
    if (!literal.empty() && literal.front() == '.') literal.insert(0, "0");
    if (literal.size() > 1 && (literal[0] == '-' || literal[0] == '+') && literal[1] == '.') {
      literal.insert(1, "0");
    }
    const auto value = literal.find(',') == std::string::npos ? text::parse_number(literal)
                                                              : std::nullopt;
    if (!value || std::count(literal.begin(), literal.end(), '.') > 1) {
      throw PlanError(Stage::Parse, "malformed number '" + literal + "'", pos.line, pos.column);
    }
    return {Tok::Number, literal, *value, pos};
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// --- parser ------------------------------------------------------------------

bool is_true_kw(const std::string& s) { return s == "true" || s == "True" || s == "TRUE"; }
bool is_false_kw(const std::string& s) { return s == "false" || s == "False" || s == "FALSE"; }
bool is_none_kw(const std::string& s) { return s == "none" || s == "None" || s == "null"; }
bool is_keyword(const std::string& s) { return is_true_kw(s) || is_false_kw(s) || is_none_kw(s); }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Plan run() {
    Plan plan;
    skip_newlines();
    if (peek().kind == Tok::End) throw error(peek(), "empty plan: expected `answer = <expression>`");
    while (peek().kind != Tok::End) {
      const auto& name_tok = expect(Tok::Name, "a name at the start of the line");
      if (is_keyword(name_tok.text)) throw error(name_tok, "'" + name_tok.text + "' cannot be assigned");
      expect(Tok::Equals, "'=' after '" + name_tok.text + "'");
      auto expr = parse_expr();
      if (peek().kind != Tok::Newline) {
        throw error(peek(), "expected end of line after expression, found " + found(peek()));
      }
      skip_newlines();
      plan.bindings.push_back(Binding{name_tok.text, std::move(expr), name_tok.pos});
    }
    if (!plan.bindings.empty() && plan.bindings.back().name == kAnswerName) {
      plan.answer = std::move(plan.bindings.back().expr);
      plan.answer_pos = plan.bindings.back().pos;
      plan.bindings.pop_back();
    }
    return plan;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  void skip_newlines() {
    while (peek().kind == Tok::Newline) ++pos_;
  }

  static std::string found(const Token& t) {
    if (t.kind == Tok::Name || t.kind == Tok::Number) return "'" + t.text + "'";
    return std::string(describe(t.kind));
  }

  PlanError error(const Token& t, const std::string& message) const {
    return PlanError(Stage::Parse, message, t.pos.line, t.pos.column);
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) throw error(peek(), "expected " + what + ", found " + found(peek()));
    return next();
  }

  Expr parse_expr() {
    const auto& t = peek();
    switch (t.kind) {
      case Tok::Number:
      case Tok::String:
        return Expr{Literal{parse_scalar()}, t.pos};
      case Tok::LBracket:
        return parse_list();
      case Tok::Name: {
        const auto& name = next();
        if (is_keyword(name.text)) {
          --pos_;
          return Expr{Literal{parse_scalar()}, name.pos};
        }
        if (peek().kind != Tok::LParen) return Expr{Ref{name.text}, name.pos};
        next();
        Call call{name.text, {}};
        if (peek().kind != Tok::RParen) {
          while (true) {
            call.args.push_back(parse_expr());
            if (peek().kind == Tok::Comma) {
              next();
              continue;
            }
            break;
          }
        }
        expect(Tok::RParen, "')' to close the call to " + name.text);
        return Expr{std::move(call), name.pos};
      }
      default:
        throw error(t, "expected an expression, found " + found(t));
    }
  }

  Cell parse_scalar() {
    const auto& t = next();
    if (t.kind == Tok::Number) return Cell{t.number};
    if (t.kind == Tok::String) return Cell{t.text};
    if (t.kind == Tok::Name && is_true_kw(t.text)) return Cell{true};
    if (t.kind == Tok::Name && is_false_kw(t.text)) return Cell{false};
    if (t.kind == Tok::Name && is_none_kw(t.text)) return Cell{};
    throw error(t, "expected a literal value inside a list, found " + found(t));
  }

  Expr parse_list() {
    const auto& open = next();
    std::vector<Cell> items;
    if (peek().kind != Tok::RBracket) {
      while (true) {
        items.push_back(parse_scalar());
        if (peek().kind == Tok::Comma) {
          next();
          continue;
        }
        break;
      }
    }
    expect(Tok::RBracket, "']' to close the list");
    return Expr{Literal{std::move(items)}, open.pos};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string clean_source(std::string_view source) {
  std::string body = source.find("```") != std::string_view::npos ? reply::strip_code_fences(source)
                                                                  : std::string(source);
  // Drop a leading bare language tag such as "dsl" or "plan".
  const auto first_nl = body.find('\n');
  const auto first_line = text::trim_view(std::string_view(body).substr(0, first_nl));
  if (!first_line.empty() && first_line.find_first_of("=(#") == std::string_view::npos &&
      std::all_of(first_line.begin(), first_line.end(), is_name_char) && first_nl != std::string::npos) {
    body.erase(0, first_nl + 1);
  }
  return body;
}

}  // namespace

Plan parse_plan(std::string_view source) {
  const auto body = clean_source(source);
  return Parser(Lexer(body).run()).run();
}

// --- rendering -----------------------------------------------------------------

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out.push_back(c);
    }
  }
  return out + "\"";
}

std::string render_cell(const Cell& c) {
  if (c.is_missing()) return "none";
  if (c.is_bool()) return c.boolean() ? "true" : "false";
  if (c.is_number()) return text::render_number(c.number());
  return quote(c.text());
}

}  // namespace

std::string render_expr(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Call>) {
          std::string out = n.fn + "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i > 0) out += ", ";
            out += render_expr(n.args[i]);
          }
          return out + ")";
        } else if constexpr (std::is_same_v<T, Ref>) {
          return n.name;
        } else {
          if (const auto* c = std::get_if<Cell>(&n.value)) return render_cell(*c);
          const auto& items = std::get<std::vector<Cell>>(n.value);
          std::string out = "[";
          for (std::size_t i = 0; i < items.size(); ++i) {
            if (i > 0) out += ", ";
            out += render_cell(items[i]);
          }
          return out + "]";
        }
      },
      e.node);
}

std::string render_plan(const Plan& p) {
  std::string out;
  for (const auto& b : p.bindings) out += b.name + " = " + render_expr(b.expr) + "\n";
  if (p.answer) out += std::string(kAnswerName) + " = " + render_expr(*p.answer) + "\n";
  return out;
}

// --- validation ----------------------------------------------------------------

namespace {

class Validator {
 public:
  explicit Validator(const std::vector<std::string>& schema) : schema_(schema) {
    defined_.insert(std::string(kInputName));
  }

  void check(Expr& e) {
    if (auto* call = std::get_if<Call>(&e.node)) {
      const auto* b = find_builtin(call->fn);
      if (b == nullptr) {
        const auto near = suggest_builtins(call->fn);
        throw fail(e.pos, "unknown function '" + call->fn + "'" +
                              (near.empty() ? "" : "; did you mean " + text::join(near, ", ") + "?"));
      }
      if (call->args.size() != b->params.size()) {
        throw fail(e.pos, std::string(b->name) + " takes " + std::to_string(b->params.size()) +
                              " argument(s), got " + std::to_string(call->args.size()));
      }
      for (std::size_t i = 0; i < call->args.size(); ++i) {
        auto& arg = call->args[i];
        check(arg);
        check_param(*b, i, arg);
      }
    } else if (const auto* ref = std::get_if<Ref>(&e.node)) {
      if (!defined_.count(ref->name)) {
        throw fail(e.pos, "'" + ref->name + "' is not defined (only df and names assigned on earlier lines can be used)");
      }
    }
  }

  void define(const Binding& b) {
    if (b.name == kInputName) throw fail(b.pos, "df cannot be reassigned");
    if (b.name == kAnswerName) {
      throw fail(b.pos, "`answer` must be assigned exactly once, on the last line");
    }
    defined_.insert(b.name);
  }

  PlanError fail(SourcePos pos, const std::string& message) const {
    return PlanError(Stage::Validate, message, pos.line, pos.column);
  }

 private:
  void check_param(const Builtin& b, std::size_t i, Expr& arg) {
    auto* lit = std::get_if<Literal>(&arg.node);
    if (lit == nullptr) return;
    const auto where = "argument " + std::to_string(i + 1) + " of " + std::string(b.name);
    const auto* cell = std::get_if<Cell>(&lit->value);
    switch (b.params[i]) {
      case Param::Table:
        throw fail(arg.pos, where + " must be a table (df or a table-valued name)");
      case Param::Column:
        if (cell == nullptr || !cell->is_text()) throw fail(arg.pos, where + " must be a column name string");
        if (!schema_.empty()) *lit = Literal{Cell{fuzzy::correct_name(cell->text(), schema_)}};
        break;
      case Param::Number:
      case Param::Integer:
      case Param::Boolean:
      case Param::Scalar:
      case Param::Value:
        if (cell == nullptr) throw fail(arg.pos, where + " must be a single value, not a list");
        break;
      case Param::List:
        break;
    }
  }

  const std::vector<std::string>& schema_;
  std::set<std::string> defined_;
};

std::size_t count_calls(const Expr& e) {
  if (const auto* c = std::get_if<Call>(&e.node)) {
    std::size_t n = 1;
    for (const auto& a : c->args) n += count_calls(a);
    return n;
  }
  return 0;
}

}  // namespace

Plan validate_plan(Plan p, const std::vector<std::string>& schema) {
  Validator v(schema);
  for (auto& b : p.bindings) {
    v.check(b.expr);
    v.define(b);
  }
  if (!p.answer) {
    const SourcePos end = p.bindings.empty() ? SourcePos{1, 1} : p.bindings.back().pos;
    throw v.fail(end, "missing final line `answer = <expression>`");
  }
  v.check(*p.answer);
  return p;
}

std::size_t call_count(const Plan& p) {
  std::size_t n = 0;
  for (const auto& b : p.bindings) n += count_calls(b.expr);
  if (p.answer) n += count_calls(*p.answer);
  return n;
}

}  // namespace tqa::plan
