#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "memcat/litmus.hpp"

namespace memcat {

namespace {

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  long value = 0;
  int line = 0, col = 0;
};

class Lexer {
 public:
  Lexer(const std::string& text, int line) : s_(text), line_(line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip();
      Token t;
      t.line = line_;
      t.col = col_;
      if (i_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      char c = s_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i_;
        while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_' ||
                                 s_[j] == '.'))
          ++j;
        t.kind = Token::Kind::Ident;
        t.text = s_.substr(i_, j - i_);
        advance(j - i_);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
        std::size_t j = i_ + 1;
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
        t.kind = Token::Kind::Int;
        t.text = s_.substr(i_, j - i_);
        t.value = std::stol(t.text);
        advance(j - i_);
      } else if (s_.compare(i_, 2, "/\\") == 0 || s_.compare(i_, 2, "\\/") == 0) {
        t.kind = Token::Kind::Punct;
        t.text = s_.substr(i_, 2);
        advance(2);
      } else if (std::string("{}[]();,:=&+~-").find(c) != std::string::npos) {
        t.kind = Token::Kind::Punct;
        t.text = std::string(1, c);
        advance(1);
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
      }
      out.push_back(t);
    }
  }

 private:
  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++i_;
    }
  }
  void skip() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else if (c == '#' || s_.compare(i_, 2, "//") == 0) {
        while (i_ < s_.size() && s_[i_] != '\n') advance(1);
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_;
  int col_ = 1;
};

const std::set<std::string> kCondSuffixes = {"eq", "ne", "cs", "cc", "mi", "pl", "vs",
                                             "vc", "hi", "ls", "ge", "lt", "gt", "le"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  void body(LitmusTest& test) {
    if (peek_ident("init")) parse_init(test);
    while (peek_ident("thread")) parse_thread(test);
    if (test.threads.empty()) fail("test has no threads");
    if (peek_ident("final")) parse_final(test);
    if (peek_ident("expect")) parse_expect(test);
    if (cur().kind != Token::Kind::End) fail("unexpected '" + cur().text + "'");
  }

 private:
  const Token& cur() const { return t_[p_]; }
  const Token& ahead(std::size_t k) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, cur().line, cur().col); }
  bool peek_ident(const std::string& s) const {
    return cur().kind == Token::Kind::Ident && cur().text == s;
  }
  bool peek_punct(const std::string& s) const {
    return cur().kind == Token::Kind::Punct && cur().text == s;
  }
  bool accept(const std::string& s) {
    if (peek_punct(s)) {
      ++p_;
      return true;
    }
    return false;
  }
  void expect(const std::string& s) {
    if (!accept(s)) fail("expected '" + s + "', found '" + cur().text + "'");
  }
  std::string ident(const char* what) {
    if (cur().kind != Token::Kind::Ident) fail(std::string("expected ") + what);
    return t_[p_++].text;
  }
  long integer() {
    if (cur().kind != Token::Kind::Int) fail("expected integer");
    return t_[p_++].value;
  }
  std::string reg() {
    int line = cur().line, col = cur().col;
    std::string r = ident("register");
    if (!is_register(r)) throw ParseError("'" + r + "' is not a register", line, col);
    return r;
  }
  int thread_id() {
    std::string s = ident("thread name");
    if (s.size() < 2 || s[0] != 'T' || !std::all_of(s.begin() + 1, s.end(), ::isdigit))
      fail("bad thread name '" + s + "'");
    return std::stoi(s.substr(1));
  }

  void parse_init(LitmusTest& test) {
    ++p_;
    expect("{");
    while (!accept("}")) {
      int thread = -1;
      if (cur().kind == Token::Kind::Ident && ahead(1).text == ":" && ahead(1).kind == Token::Kind::Punct) {
        thread = thread_id();
        expect(":");
      }
      std::string name = ident("location or register");
      expect("=");
      if (is_register(name)) {
        RegInit ri;
        ri.thread = thread;
        ri.reg = name;
        if (accept("&")) {
          ri.is_addr = true;
          ri.loc = ident("location");
        } else {
          ri.value = integer();
        }
        test.reg_init.push_back(ri);
      } else {
        if (thread != -1) fail("memory location cannot be thread qualified");
        test.mem_init.emplace_back(name, integer());
      }
      accept(";");
    }
  }

  std::vector<std::string> address() {
    expect("[");
    std::vector<std::string> a{ident("address")};
    if (accept("+")) a.push_back(reg());
    expect("]");
    return a;
  }

  void parse_thread(LitmusTest& test) {
    ++p_;
    int id = thread_id();
    if (id != static_cast<int>(test.threads.size()))
      fail("threads must be numbered T0, T1, ... in order");
    expect("{");
    std::vector<Instruction> code;
    while (!accept("}")) {
      if (accept(";")) continue;
      Instruction in;
      in.line = cur().line;
      std::string m = ident("instruction");
      if (accept(":")) {
        in.kind = Instruction::Kind::LabelDef;
        in.label = m;
      } else if (m == "li") {
        in.kind = Instruction::Kind::MovConst;
        in.dst = reg();
        expect(",");
        in.imm = integer();
      } else if (m == "load") {
        in.kind = Instruction::Kind::Load;
        in.dst = reg();
        expect(",");
        in.addr = address();
      } else if (m == "store") {
        in.kind = Instruction::Kind::Store;
        in.addr = address();
        expect(",");
        if (cur().kind == Token::Kind::Int)
          in.imm = integer();
        else
          in.src = reg();
      } else if (m == "xor" || m == "add") {
        in.kind = m == "xor" ? Instruction::Kind::Xor : Instruction::Kind::Add;
        in.dst = reg();
        expect(",");
        in.src1 = reg();
        expect(",");
        in.src2 = reg();
      } else if (m == "cmp") {
        in.kind = Instruction::Kind::Cmp;
        in.src1 = reg();
        expect(",");
        in.imm = integer();
      } else if (m == "bne" || m == "beq") {
        in.kind = Instruction::Kind::Branch;
        in.cond = m;
        in.label = ident("label");
      } else if (auto f = parse_fence(m)) {
        in.kind = Instruction::Kind::Fence;
        in.fence = *f;
        if (!fence_in_arch(*f, test.arch))
          fail("fence " + m + " does not belong to architecture " + arch_name(test.arch));
      } else {
        for (const char* base : {"li", "load", "store", "xor", "add", "cmp"}) {
          std::string b = base;
          if (m.size() == b.size() + 2 && m.compare(0, b.size(), b) == 0 &&
              kCondSuffixes.count(m.substr(b.size())))
            fail("conditional execution ('" + m + "') is not supported");
        }
        fail("unknown instruction '" + m + "'");
      }
      code.push_back(in);
    }
    // branch targets: only the label immediately following the branch
    std::set<std::string> labels;
    for (const auto& in : code)
      if (in.kind == Instruction::Kind::LabelDef && !labels.insert(in.label).second)
        throw ParseError("duplicate label " + in.label, in.line, 1);
    for (std::size_t i = 0; i < code.size(); ++i) {
      const auto& in = code[i];
      if (in.kind != Instruction::Kind::Branch) continue;
      if (!labels.count(in.label))
        throw ParseError("branch target " + in.label + " is not defined", in.line, 1);
      if (i + 1 >= code.size() || code[i + 1].kind != Instruction::Kind::LabelDef ||
          code[i + 1].label != in.label)
        throw ParseError("branch target " + in.label + " is not the immediately following label",
                         in.line, 1);
    }
    test.threads.push_back(std::move(code));
  }

  Cond cond_atom() {
    Cond c;
    if (accept("~")) {
      c.kind = Cond::Kind::Not;
      c.kids.push_back(cond_atom());
      return c;
    }
    if (accept("(")) {
      c = cond_or();
      expect(")");
      return c;
    }
    if (peek_ident("true")) {
      ++p_;
      return c;
    }
    if (cur().kind == Token::Kind::Ident && ahead(1).kind == Token::Kind::Punct && ahead(1).text == ":") {
      c.kind = Cond::Kind::RegEq;
      c.thread = thread_id();
      expect(":");
      c.name = reg();
    } else {
      c.kind = Cond::Kind::LocEq;
      c.name = ident("location");
    }
    expect("=");
    c.value = integer();
    return c;
  }
  Cond cond_and() {
    Cond first = cond_atom();
    if (!peek_punct("/\\")) return first;
    Cond c;
    c.kind = Cond::Kind::And;
    c.kids.push_back(first);
    while (accept("/\\")) c.kids.push_back(cond_atom());
    return c;
  }
  Cond cond_or() {
    Cond first = cond_and();
    if (!peek_punct("\\/")) return first;
    Cond c;
    c.kind = Cond::Kind::Or;
    c.kids.push_back(first);
    while (accept("\\/")) c.kids.push_back(cond_and());
    return c;
  }

  void parse_final(LitmusTest& test) {
    ++p_;
    using Q = FinalCondition::Quantifier;
    if (accept("~")) {
      if (!peek_ident("exists")) fail("expected 'exists' after '~'");
      ++p_;
      test.final.quantifier = Q::NotExists;
    } else {
      std::string q = ident("quantifier");
      if (q == "exists")
        test.final.quantifier = Q::Exists;
      else if (q == "forall")
        test.final.quantifier = Q::Forall;
      else if (q == "observed")
        test.final.quantifier = Q::Observed;
      else
        fail("unknown quantifier '" + q + "'");
    }
    if (test.final.quantifier != Q::Observed) test.final.clause = cond_or();
  }

  void parse_expect(LitmusTest& test) {
    ++p_;
    expect("{");
    while (!accept("}")) {
      std::string model = ident("model name");
      while (accept("-")) model += "-" + ident("model name");
      expect(":");
      std::string v = ident("allowed or forbidden");
      if (v != "allowed" && v != "forbidden") fail("expected allowed or forbidden");
      test.expect.emplace_back(model, v);
      accept(";");
    }
  }

  std::vector<Token> t_;
  std::size_t p_ = 0;
};

void check_cond(const LitmusTest& t, const Cond& c, const std::set<std::string>& locs,
                const std::vector<std::set<std::string>>& regs) {
  switch (c.kind) {
    case Cond::Kind::RegEq:
      if (c.thread < 0 || c.thread >= static_cast<int>(t.threads.size()))
        throw ParseError("final condition names unknown thread T" + std::to_string(c.thread), 0, 0);
      if (!regs[c.thread].count(c.name))
        throw ParseError("final condition names undeclared register T" + std::to_string(c.thread) +
                             ":" + c.name,
                         0, 0);
      break;
    case Cond::Kind::LocEq:
      if (!locs.count(c.name))
        throw ParseError("final condition names unknown location " + c.name, 0, 0);
      break;
    default:
      for (const auto& k : c.kids) check_cond(t, k, locs, regs);
  }
}

}  // namespace

bool is_register(const std::string& s) {
  static const std::regex re("r[0-9]+");
  return std::regex_match(s, re);
}

std::optional<Arch> parse_arch(const std::string& s) {
  if (s == "SC") return Arch::SC;
  if (s == "TSO" || s == "X86") return Arch::TSO;
  if (s == "Power" || s == "PPC") return Arch::Power;
  if (s == "ARM") return Arch::ARM;
  if (s == "generic") return Arch::Generic;
  return std::nullopt;
}

bool fence_in_arch(FenceKind k, Arch a) {
  switch (a) {
    case Arch::SC: return false;
    case Arch::TSO: return k == FenceKind::Mfence;
    case Arch::Power:
      return k == FenceKind::Sync || k == FenceKind::Lwsync || k == FenceKind::Eieio ||
             k == FenceKind::Isync;
    case Arch::ARM:
      return k == FenceKind::Dmb || k == FenceKind::Dsb || k == FenceKind::DmbSt ||
             k == FenceKind::DsbSt || k == FenceKind::Isb;
    case Arch::Generic: return true;
  }
  return false;
}

std::vector<std::string> LitmusTest::locations() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& l) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  };
  for (const auto& [l, v] : mem_init) add(l);
  for (const auto& ri : reg_init)
    if (ri.is_addr) add(ri.loc);
  for (const auto& th : threads)
    for (const auto& in : th)
      if (!in.addr.empty() && !is_register(in.addr[0])) add(in.addr[0]);
  return out;
}

int LitmusTest::memory_accesses() const {
  int n = 0;
  for (const auto& th : threads)
    for (const auto& in : th)
      if (in.kind == Instruction::Kind::Load || in.kind == Instruction::Kind::Store) ++n;
  return n;
}

LitmusTest parse_litmus(const std::string& text) {
  LitmusTest test;
  // header: first non-blank, non-comment line is "name arch"
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::size_t consumed = 0;
  while (std::getline(is, line)) {
    ++lineno;
    consumed += line.size() + 1;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line.compare(first, 2, "//") == 0) continue;
    std::istringstream ls(line);
    std::string arch;
    ls >> test.name >> arch;
    if (arch.empty()) throw ParseError("header must be 'name arch'", lineno, 1);
    auto a = parse_arch(arch);
    if (!a) throw ParseError("unknown architecture '" + arch + "'", lineno, 1);
    test.arch = *a;
    break;
  }
  if (test.name.empty()) throw ParseError("empty litmus file", 1, 1);
  std::string rest = consumed < text.size() ? text.substr(consumed) : std::string();
  Parser p(Lexer(rest, lineno + 1).run());
  p.body(test);

  std::set<std::string> locs;
  for (const auto& l : test.locations()) locs.insert(l);
  std::vector<std::set<std::string>> regs(test.threads.size());
  for (const auto& ri : test.reg_init) {
    if (ri.thread >= static_cast<int>(test.threads.size()))
      throw ParseError("init names unknown thread T" + std::to_string(ri.thread), 0, 0);
    for (std::size_t t = 0; t < regs.size(); ++t)
      if (ri.thread < 0 || ri.thread == static_cast<int>(t)) regs[t].insert(ri.reg);
  }
  for (std::size_t t = 0; t < test.threads.size(); ++t)
    for (const auto& in : test.threads[t])
      if (!in.dst.empty()) regs[t].insert(in.dst);
  check_cond(test, test.final.clause, locs, regs);

  std::map<std::string, std::set<long>> stored;
  for (const auto& [l, v] : test.mem_init) stored[l].insert(v);
  for (const auto& th : test.threads)
    for (const auto& in : th)
      if (in.kind == Instruction::Kind::Store && in.src.empty() && !is_register(in.addr[0]) &&
          !stored[in.addr[0]].insert(in.imm).second)
        test.warnings.push_back("value " + std::to_string(in.imm) + " stored twice to " + in.addr[0]);
  return test;
}

LitmusTest load_litmus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_litmus(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line, e.col);
  }
}

std::string print_cond(const Cond& c) {
  switch (c.kind) {
    case Cond::Kind::True: return "true";
    case Cond::Kind::RegEq: return "T" + std::to_string(c.thread) + ":" + c.name + "=" + std::to_string(c.value);
    case Cond::Kind::LocEq: return c.name + "=" + std::to_string(c.value);
    case Cond::Kind::Not: return "~(" + print_cond(c.kids[0]) + ")";
    case Cond::Kind::And:
    case Cond::Kind::Or: {
      std::string sep = c.kind == Cond::Kind::And ? " /\\ " : " \\/ ";
      std::string out;
      for (std::size_t i = 0; i < c.kids.size(); ++i) {
        const Cond& k = c.kids[i];
        bool paren = k.kind == Cond::Kind::And || k.kind == Cond::Kind::Or;
        out += (i ? sep : "") + (paren ? "(" + print_cond(k) + ")" : print_cond(k));
      }
      return out;
    }
  }
  return "";
}

std::string print_instruction(const Instruction& in) {
  auto addr = [&] {
    std::string s = "[" + in.addr[0];
    if (in.addr.size() > 1) s += "+" + in.addr[1];
    return s + "]";
  };
  switch (in.kind) {
    case Instruction::Kind::MovConst: return "li " + in.dst + ", " + std::to_string(in.imm);
    case Instruction::Kind::Load: return "load " + in.dst + ", " + addr();
    case Instruction::Kind::Store:
      return "store " + addr() + ", " + (in.src.empty() ? std::to_string(in.imm) : in.src);
    case Instruction::Kind::Xor: return "xor " + in.dst + ", " + in.src1 + ", " + in.src2;
    case Instruction::Kind::Add: return "add " + in.dst + ", " + in.src1 + ", " + in.src2;
    case Instruction::Kind::Cmp: return "cmp " + in.src1 + ", " + std::to_string(in.imm);
    case Instruction::Kind::Branch: return in.cond + " " + in.label;
    case Instruction::Kind::Fence: return fence_name(in.fence);
    case Instruction::Kind::LabelDef: return in.label + ":";
  }
  return "";
}

std::string print_litmus(const LitmusTest& t) {
  std::ostringstream os;
  os << t.name << " " << arch_name(t.arch) << "\n";
  if (!t.mem_init.empty() || !t.reg_init.empty()) {
    os << "init {";
    for (const auto& [l, v] : t.mem_init) os << " " << l << "=" << v << ";";
    for (const auto& ri : t.reg_init) {
      os << " ";
      if (ri.thread >= 0) os << "T" << ri.thread << ":";
      os << ri.reg << "=";
      if (ri.is_addr)
        os << "&" << ri.loc;
      else
        os << ri.value;
      os << ";";
    }
    os << " }\n";
  }
  for (std::size_t i = 0; i < t.threads.size(); ++i) {
    os << "thread T" << i << " {\n";
    for (const auto& in : t.threads[i]) os << "  " << print_instruction(in) << "\n";
    os << "}\n";
  }
  using Q = FinalCondition::Quantifier;
  switch (t.final.quantifier) {
    case Q::Exists: os << "final exists (" << print_cond(t.final.clause) << ")\n"; break;
    case Q::NotExists: os << "final ~exists (" << print_cond(t.final.clause) << ")\n"; break;
    case Q::Forall: os << "final forall (" << print_cond(t.final.clause) << ")\n"; break;
    case Q::Observed: os << "final observed\n"; break;
  }
  if (!t.expect.empty()) {
    os << "expect {";
    for (const auto& [m, v] : t.expect) os << " " << m << ": " << v << ";";
    os << " }\n";
  }
  return os.str();
}

}  // namespace memcat
