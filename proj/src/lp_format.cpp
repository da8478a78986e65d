#include "helio/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "helio/errors.hpp"

namespace helio {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_terms(std::ostringstream& os, const std::vector<std::pair<int, double>>& terms,
                  const std::vector<std::string>& names) {
  bool first = true;
  for (auto [j, a] : terms) {
    if (a == 0.0) continue;
    if (first) {
      if (a < 0) os << "- ";
      first = false;
    } else {
      os << (a < 0 ? " - " : " + ");
    }
    double mag = std::fabs(a);
    if (mag != 1.0) os << num(mag) << " ";
    os << names[j];
  }
  if (first) os << "0 " << names[0];  // degenerate all-zero expression
}

}  // namespace

std::string lp_format_text(const LpProblem& p) {
  std::ostringstream os;
  os << "Maximize\n obj: ";
  std::vector<std::pair<int, double>> obj_terms;
  for (int j = 0; j < p.num_vars(); ++j)
    if (p.obj[j] != 0.0) obj_terms.push_back({j, p.obj[j]});
  append_terms(os, obj_terms, p.var_names);
  os << "\nSubject To\n";
  int anon = 0;
  for (const LpRow& row : p.rows) {
    std::string name = row.name.empty() ? "r" + std::to_string(anon) : row.name;
    ++anon;
    os << " " << name << ": ";
    append_terms(os, row.coef, p.var_names);
    switch (row.sense) {
      case RowSense::kLe: os << " <= "; break;
      case RowSense::kGe: os << " >= "; break;
      case RowSense::kEq: os << " = "; break;
    }
    os << num(row.rhs) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < p.num_vars(); ++j) {
    double lo = p.lo[j], hi = p.hi[j];
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      os << " " << p.var_names[j] << " free\n";
    } else if (lo == hi) {
      os << " " << p.var_names[j] << " = " << num(lo) << "\n";
    } else if (!std::isfinite(hi)) {
      os << " " << p.var_names[j] << " >= " << num(lo) << "\n";
    } else if (!std::isfinite(lo)) {
      os << " -infinity <= " << p.var_names[j] << " <= " << num(hi) << "\n";
    } else {
      os << " " << num(lo) << " <= " << p.var_names[j] << " <= " << num(hi) << "\n";
    }
  }
  std::string generals, binaries;
  for (int j = 0; j < p.num_vars(); ++j) {
    if (!p.is_int[j]) continue;
    if (p.lo[j] == 0 && p.hi[j] == 1)
      binaries += " " + p.var_names[j] + "\n";
    else
      generals += " " + p.var_names[j] + "\n";
  }
  if (!generals.empty()) os << "General\n" << generals;
  if (!binaries.empty()) os << "Binary\n" << binaries;
  os << "End\n";
  return os.str();
}

void export_lp_file(const LpProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << lp_format_text(p);
}

namespace {

struct Tok {
  enum Kind { kWord, kNum, kOp, kEnd } kind;
  std::string text;
  double value = 0;
};

class Lexer {
 public:
  Lexer(const std::string& text, std::string origin) : s_(text), origin_(std::move(origin)) {}

  Tok next() {
    skip_ws();
    if (pos_ >= s_.size()) return {Tok::kEnd, ""};
    char c = s_[pos_];
    if (c == '<' || c == '>' || c == '=' || c == ':' || c == '+' || c == '-') {
      size_t start = pos_++;
      if ((c == '<' || c == '>') && pos_ < s_.size() && s_[pos_] == '=') ++pos_;
      return {Tok::kOp, s_.substr(start, pos_ - start)};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
              s_[pos_] == 'e' || s_[pos_] == 'E' ||
              ((s_[pos_] == '+' || s_[pos_] == '-') &&
               (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
        ++pos_;
      Tok t{Tok::kNum, s_.substr(start, pos_ - start)};
      t.value = std::stod(t.text);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
              s_[pos_] == '.'))
        ++pos_;
      return {Tok::kWord, s_.substr(start, pos_ - start)};
    }
    throw ParseError(origin_ + ": unexpected character '" + std::string(1, c) + "'");
  }

  Tok peek() {
    size_t save = pos_;
    Tok t = next();
    pos_ = save;
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\\') {  // comment to end of line
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  std::string origin_;
  size_t pos_ = 0;
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool is_section_word(const std::string& w) {
  static const char* kw[] = {"maximize", "maximise", "minimize", "minimise", "subject",
                             "st",       "s.t.",     "bounds",   "bound",    "general",
                             "generals", "gen",      "binary",   "binaries", "bin",
                             "end",      "free"};
  for (const char* k : kw)
    if (w == k) return true;
  return false;
}

}  // namespace

LpProblem parse_lp_text(const std::string& text, const std::string& origin) {
  Lexer lex(text, origin);
  LpProblem p;
  std::map<std::string, int> index;
  auto var_of = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    int j = p.add_var(name, 0.0, kInf, 0.0, false);
    index[name] = j;
    return j;
  };

  enum Section { kNone, kObj, kRows, kBounds, kGeneral, kBinary } sec = kNone;
  bool minimize = false;
  LpRow* cur_row = nullptr;
  double pending_sign = 1.0;
  std::optional<double> pending_coef;

  auto flush_term = [&](const std::string& var) {
    double c = pending_sign * pending_coef.value_or(1.0);
    int j = var_of(var);
    if (sec == kObj)
      p.obj[j] += c;
    else
      cur_row->coef.push_back({j, c});
    pending_sign = 1.0;
    pending_coef.reset();
  };

  std::vector<LpRow> rows;
  Tok t = lex.next();
  while (t.kind != Tok::kEnd) {
    if (t.kind == Tok::kWord) {
      std::string w = lower(t.text);
      if (w == "maximize" || w == "maximise" || w == "minimize" || w == "minimise" ||
          w == "max" || w == "min") {
        minimize = (w[2] == 'n' || w == "minimize" || w == "minimise");
        sec = kObj;
        t = lex.next();
        continue;
      }
      if (w == "subject" || w == "st" || w == "s.t.") {
        if (w == "subject") {
          Tok to = lex.next();
          if (!(to.kind == Tok::kWord && lower(to.text) == "to"))
            throw ParseError(origin + ": expected 'To' after 'Subject'");
        }
        sec = kRows;
        t = lex.next();
        continue;
      }
      if (w == "bounds" || w == "bound") {
        sec = kBounds;
        t = lex.next();
        continue;
      }
      if (w == "general" || w == "generals" || w == "gen") {
        sec = kGeneral;
        t = lex.next();
        continue;
      }
      if (w == "binary" || w == "binaries" || w == "bin") {
        sec = kBinary;
        t = lex.next();
        continue;
      }
      if (w == "end") break;
    }

    switch (sec) {
      case kObj:
      case kRows: {
        if (t.kind == Tok::kWord) {
          // Could be "name:" prefix.
          Tok nxt = lex.peek();
          if (nxt.kind == Tok::kOp && nxt.text == ":") {
            lex.next();
            if (sec == kRows) {
              rows.push_back({});
              cur_row = &rows.back();
              cur_row->name = t.text;
            }
          } else {
            if (sec == kRows && !cur_row) {
              rows.push_back({});
              cur_row = &rows.back();
            }
            flush_term(t.text);
          }
        } else if (t.kind == Tok::kNum) {
          pending_coef = pending_coef.value_or(1.0) * t.value;
          Tok nxt = lex.peek();
          if (sec == kRows && !(nxt.kind == Tok::kWord && !is_section_word(lower(nxt.text)))) {
            // Trailing constant: only legal as a row RHS, handled below.
            throw ParseError(origin + ": dangling numeric constant");
          }
        } else if (t.kind == Tok::kOp) {
          if (t.text == "+") {
            pending_sign = 1.0;
          } else if (t.text == "-") {
            pending_sign = -pending_sign;
          } else if (t.text == "<=" || t.text == ">=" || t.text == "=" || t.text == "<" ||
                     t.text == ">") {
            if (sec != kRows || !cur_row)
              throw ParseError(origin + ": relation outside a constraint");
            cur_row->sense = (t.text[0] == '<')   ? RowSense::kLe
                             : (t.text[0] == '>') ? RowSense::kGe
                                                  : RowSense::kEq;
            double sign = 1.0;
            Tok rhs = lex.next();
            if (rhs.kind == Tok::kOp && (rhs.text == "-" || rhs.text == "+")) {
              sign = rhs.text == "-" ? -1.0 : 1.0;
              rhs = lex.next();
            }
            if (rhs.kind != Tok::kNum) throw ParseError(origin + ": constraint needs numeric rhs");
            cur_row->rhs = sign * rhs.value;
            cur_row = nullptr;
            pending_sign = 1.0;
            pending_coef.reset();
          } else {
            throw ParseError(origin + ": unexpected operator '" + t.text + "'");
          }
        }
        break;
      }
      case kBounds: {
        // Forms: [num <=] var [<= num] | var = num | var free | var >= num |
        //        -infinity <= var <= num
        double first_sign = 1.0;
        Tok cur = t;
        std::optional<double> lhs;
        if (cur.kind == Tok::kOp && (cur.text == "-" || cur.text == "+")) {
          first_sign = cur.text == "-" ? -1.0 : 1.0;
          cur = lex.next();
        }
        if (cur.kind == Tok::kNum ||
            (cur.kind == Tok::kWord && (lower(cur.text) == "infinity" || lower(cur.text) == "inf"))) {
          lhs = cur.kind == Tok::kNum ? first_sign * cur.value
                                      : first_sign * kInf;
          Tok rel = lex.next();
          if (!(rel.kind == Tok::kOp && (rel.text == "<=" || rel.text == "<")))
            throw ParseError(origin + ": malformed bound line");
          cur = lex.next();
        }
        if (cur.kind != Tok::kWord) throw ParseError(origin + ": expected variable in bounds");
        int j = var_of(cur.text);
        if (lhs) p.lo[j] = *lhs;
        Tok nxt = lex.peek();
        if (nxt.kind == Tok::kOp && (nxt.text == "<=" || nxt.text == "<")) {
          lex.next();
          Tok v = lex.next();
          double sign = 1.0;
          if (v.kind == Tok::kOp && (v.text == "-" || v.text == "+")) {
            sign = v.text == "-" ? -1.0 : 1.0;
            v = lex.next();
          }
          if (v.kind == Tok::kWord && (lower(v.text) == "infinity" || lower(v.text) == "inf"))
            p.hi[j] = sign > 0 ? kInf : -kInf;
          else if (v.kind == Tok::kNum)
            p.hi[j] = sign * v.value;
          else
            throw ParseError(origin + ": malformed upper bound");
        } else if (nxt.kind == Tok::kOp && (nxt.text == ">=" || nxt.text == ">")) {
          lex.next();
          Tok v = lex.next();
          double sign = 1.0;
          if (v.kind == Tok::kOp && (v.text == "-" || v.text == "+")) {
            sign = v.text == "-" ? -1.0 : 1.0;
            v = lex.next();
          }
          if (v.kind != Tok::kNum) throw ParseError(origin + ": malformed lower bound");
          p.lo[j] = sign * v.value;
        } else if (nxt.kind == Tok::kOp && nxt.text == "=") {
          lex.next();
          Tok v = lex.next();
          double sign = 1.0;
          if (v.kind == Tok::kOp && (v.text == "-" || v.text == "+")) {
            sign = v.text == "-" ? -1.0 : 1.0;
            v = lex.next();
          }
          if (v.kind != Tok::kNum) throw ParseError(origin + ": malformed fixed bound");
          p.lo[j] = p.hi[j] = sign * v.value;
        } else if (nxt.kind == Tok::kWord && lower(nxt.text) == "free") {
          lex.next();
          p.lo[j] = -kInf;
          p.hi[j] = kInf;
        }
        break;
      }
      case kGeneral:
      case kBinary: {
        if (t.kind != Tok::kWord)
          throw ParseError(origin + ": expected variable name in integer section");
        int j = var_of(t.text);
        p.is_int[j] = 1;
        if (sec == kBinary) {
          p.lo[j] = 0;
          p.hi[j] = 1;
        }
        break;
      }
      case kNone:
        throw ParseError(origin + ": content before a section keyword");
    }
    t = lex.next();
  }

  p.rows = std::move(rows);
  if (minimize)
    for (double& c : p.obj) c = -c;
  return p;
}

LpProblem parse_lp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lp_text(ss.str(), path);
}

}  // namespace helio
