#include "ghcft/format.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "ghcft/error.h"

namespace ghcft {

bool structurally_equal(const ModelDocument& lhs, const ModelDocument& rhs) {
  return lhs.format_version == rhs.format_version &&
         lhs.metadata == rhs.metadata &&
         structurally_equal(lhs.system, rhs.system);
}

namespace {

enum class Tok { kWord, kString, kLBrace, kRBrace, kArrow, kNewline, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool IsWordChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-' ||
         c == '+' || c == '/';
}

std::string Describe(const Token& t) {
  switch (t.kind) {
    case Tok::kWord: return "'" + t.text + "'";
    case Tok::kString: return "string";
    case Tok::kLBrace: return "'{'";
    case Tok::kRBrace: return "'}'";
    case Tok::kArrow: return "'->'";
    case Tok::kNewline: return "end of line";
    case Tok::kEnd: return "end of input";
  }
  return "token";
}

std::vector<Token> Lex(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1, column = 1, i = 0;
  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    std::size_t l = line, col = column;
    if (c == '\n') {
      tokens.push_back({Tok::kNewline, "", l, col});
      advance(1);
    } else if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
    } else if (c == '{') {
      tokens.push_back({Tok::kLBrace, "{", l, col});
      advance(1);
    } else if (c == '}') {
      tokens.push_back({Tok::kRBrace, "}", l, col});
      advance(1);
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      tokens.push_back({Tok::kArrow, "->", l, col});
      advance(2);
    } else if (c == '"') {
      std::string value;
      advance(1);
      while (true) {
        if (i >= text.size() || text[i] == '\n')
          throw ParseError(l, col, "unterminated string");
        if (text[i] == '"') {
          advance(1);
          break;
        }
        if (text[i] == '\\') {
          if (i + 1 >= text.size() || (text[i + 1] != '"' && text[i + 1] != '\\'))
            throw ParseError(line, column, "invalid escape in string");
          value += text[i + 1];
          advance(2);
          continue;
        }
        value += text[i];
        advance(1);
      }
      tokens.push_back({Tok::kString, std::move(value), l, col});
    } else if (IsWordChar(c)) {
      std::size_t start = i;
      while (i < text.size() && IsWordChar(text[i]) &&
             !(text[i] == '-' && i + 1 < text.size() && text[i + 1] == '>'))
        advance(1);
      tokens.push_back(
          {Tok::kWord, std::string(text.substr(start, i - start)), l, col});
    } else {
      throw ParseError(l, col,
                       std::string("unexpected character '") + c + "'");
    }
  }
  tokens.push_back({Tok::kEnd, "", line, column});
  return tokens;
}

bool IsIdentifier(std::string_view s) {
  if (s.empty()) return false;
  char first = s.front();
  if (!((first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z') ||
        first == '_'))
    return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return IsWordChar(c) && c != '+' && c != '/'; });
}

/// State ids may also be plain numbers, as in "1", "2", "3".
bool IsStateId(std::string_view s) {
  if (s.empty()) return false;
  char first = s.front();
  if (first >= '0' && first <= '9')
    return std::all_of(s.begin(), s.end(), [](char c) {
      return IsWordChar(c) && c != '+' && c != '/';
    });
  return IsIdentifier(s);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lex(text)) {}

  ModelDocument Run() {
    ModelDocument doc;
    SkipNewlines();
    if (Peek().kind != Tok::kWord || Peek().text != "ghcft")
      Fail(Peek(), "expected 'ghcft' header");
    Next();
    const Token& version = Expect(Tok::kWord, "format version");
    if (version.text != kFormatVersion)
      Fail(version, "unknown format version '" + version.text +
                        "' (supported: " + std::string(kFormatVersion) + ")");
    doc.format_version = version.text;
    EndOfLine();

    std::set<std::string> component_ids;
    while (true) {
      SkipNewlines();
      const Token& t = Peek();
      if (t.kind == Tok::kEnd) break;
      if (IsKeyword(t, "metadata")) {
        Next();
        ParseMetadata(doc);
      } else if (IsKeyword(t, "component")) {
        Next();
        const Token& id = Peek();
        Component component = ParseComponent();
        if (!component_ids.insert(component.id).second)
          Fail(id, "duplicate component id '" + component.id + "'");
        doc.system.components.push_back(std::move(component));
      } else if (IsKeyword(t, "connections")) {
        Next();
        ParseConnections(doc.system);
      } else {
        Fail(t, "expected 'metadata', 'component' or 'connections', got " +
                    Describe(t));
      }
    }
    return doc;
  }

 private:
  [[noreturn]] void Fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.column, msg);
  }

  const Token& Peek() const { return tokens_[pos_]; }
  const Token& Next() {
    const Token& t = tokens_[pos_];
    if (t.kind != Tok::kEnd) ++pos_;
    return t;
  }
  static bool IsKeyword(const Token& t, std::string_view word) {
    return t.kind == Tok::kWord && t.text == word;
  }

  const Token& Expect(Tok kind, const std::string& what) {
    if (Peek().kind != kind)
      Fail(Peek(), "expected " + what + ", got " + Describe(Peek()));
    return Next();
  }
  void ExpectKeyword(std::string_view word) {
    if (!IsKeyword(Peek(), word))
      Fail(Peek(), "expected '" + std::string(word) + "', got " + Describe(Peek()));
    Next();
  }
  std::string Identifier(const std::string& what) {
    const Token& t = Expect(Tok::kWord, what);
    if (!IsIdentifier(t.text)) Fail(t, "invalid " + what + " '" + t.text + "'");
    return t.text;
  }
  std::string StateId() {
    const Token& t = Expect(Tok::kWord, "state id");
    if (!IsStateId(t.text)) Fail(t, "invalid state id '" + t.text + "'");
    return t.text;
  }
  void SkipNewlines() {
    while (Peek().kind == Tok::kNewline) Next();
  }
  void EndOfLine() {
    if (Peek().kind == Tok::kEnd) return;
    Expect(Tok::kNewline, "end of line");
  }
  bool AtEndOfLine() const {
    return Peek().kind == Tok::kNewline || Peek().kind == Tok::kEnd;
  }
  void OpenBlock() {
    Expect(Tok::kLBrace, "'{'");
    EndOfLine();
  }
  /// True when the closing brace of the current block was consumed.
  bool CloseBlock() {
    SkipNewlines();
    if (Peek().kind != Tok::kRBrace) {
      if (Peek().kind == Tok::kEnd) Fail(Peek(), "expected '}', got end of input");
      return false;
    }
    Next();
    EndOfLine();
    return true;
  }

  void Declare(std::set<std::string>& ids, const Token& at,
               const std::string& id, const std::string& what) {
    if (!ids.insert(id).second) Fail(at, "duplicate " + what + " '" + id + "'");
  }

  void ParseMetadata(ModelDocument& doc) {
    OpenBlock();
    while (!CloseBlock()) {
      const Token& key_token = Peek();
      std::string key = Identifier("metadata key");
      const Token& value = Expect(Tok::kString, "quoted metadata value");
      if (!doc.metadata.emplace(key, value.text).second)
        Fail(key_token, "duplicate metadata key '" + key + "'");
      EndOfLine();
    }
  }

  Component ParseComponent() {
    Component component;
    const Token& id_token = Peek();
    component.id = Identifier("component id");
    if (component.id.find('.') != std::string::npos)
      Fail(id_token, "component ids must not contain '.'");
    OpenBlock();
    std::set<std::string> ports;
    bool has_element = false;
    while (!CloseBlock()) {
      const Token& t = Peek();
      if (IsKeyword(t, "inport") || IsKeyword(t, "outport")) {
        Next();
        auto& list = t.text == "inport" ? component.inports : component.outports;
        if (AtEndOfLine()) Fail(Peek(), "expected port name");
        while (!AtEndOfLine()) {
          const Token& at = Peek();
          std::string port = Identifier("port name");
          Declare(ports, at, port, "port");
          list.push_back(port);
        }
        EndOfLine();
      } else if (IsKeyword(t, "cft") || IsKeyword(t, "cmc")) {
        if (has_element)
          Fail(t, "component '" + component.id +
                      "' already has a failure logic model");
        Next();
        has_element = true;
        if (t.text == "cft")
          component.flm = ParseCft();
        else
          component.flm = ParseCmc();
      } else {
        Fail(t, "expected 'inport', 'outport', 'cft' or 'cmc', got " +
                    Describe(t));
      }
    }
    if (!has_element)
      Fail(id_token, "component '" + component.id +
                         "' has no failure logic model ('cft' or 'cmc' block)");
    return component;
  }

  Rate ParseRate() {
    const Token& t = Expect(Tok::kWord, "rate value");
    double value = 0;
    const char* begin = t.text.data();
    const char* end = begin + t.text.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
      Fail(t, "invalid rate value '" + t.text + "'");
    if (value < 0) Fail(t, "rates must be nonnegative");
    value += 0.0;  // -0 reads as 0
    bool fit = false;
    if (Peek().kind == Tok::kWord) {
      const std::string& unit = Peek().text;
      if (unit == "/h") {
        Next();
      } else if (unit == "FIT" || unit == "per1e9h") {
        Next();
        fit = true;
      }
    }
    RateKind kind = RateKind::kFailure;
    if (IsKeyword(Peek(), "failure")) {
      Next();
    } else if (IsKeyword(Peek(), "repair")) {
      Next();
      kind = RateKind::kRepair;
    }
    return fit ? Rate::Fit(value, kind) : Rate::PerHour(value, kind);
  }

  InputFailureMode ParseIfm(const std::string& id) {
    InputFailureMode ifm{id, "", ""};
    ExpectKeyword("on");
    ifm.port = Identifier("inport name");
    if (IsKeyword(Peek(), "mode")) {
      Next();
      ifm.mode = Identifier("failure mode");
    }
    return ifm;
  }

  CftElement ParseCft() {
    CftElement cft;
    OpenBlock();
    std::set<std::string> ids;
    while (!CloseBlock()) {
      const Token& t = Expect(Tok::kWord, "cft statement");
      const Token& at = Peek();
      if (t.text == "event") {
        std::string id = Identifier("event id");
        Declare(ids, at, id, "node id");
        ExpectKeyword("rate");
        BasicEvent event{id, ParseRate(), false};
        if (IsKeyword(Peek(), "never")) {
          Next();
          event.never_occurs = true;
        }
        cft.events.push_back(std::move(event));
      } else if (t.text == "gate") {
        std::string id = Identifier("gate id");
        Declare(ids, at, id, "node id");
        Gate gate{id, GateKind::kOr, {}};
        const Token& kind = Expect(Tok::kWord, "gate kind");
        if (kind.text == "and")
          gate.kind = GateKind::kAnd;
        else if (kind.text != "or")
          Fail(kind, "expected gate kind 'and' or 'or', got '" + kind.text + "'");
        if (AtEndOfLine()) Fail(Peek(), "gate '" + id + "' needs inputs");
        while (!AtEndOfLine()) gate.inputs.push_back(Identifier("gate input"));
        cft.gates.push_back(std::move(gate));
      } else if (t.text == "ifm") {
        std::string id = Identifier("input failure mode id");
        Declare(ids, at, id, "node id");
        cft.ifms.push_back(ParseIfm(id));
      } else if (t.text == "ofm") {
        std::string id = Identifier("output failure mode id");
        Declare(ids, at, id, "node id");
        CftOutputFailureMode ofm{id, "", ""};
        ExpectKeyword("on");
        ofm.port = Identifier("outport name");
        ExpectKeyword("from");
        ofm.input = Identifier("node id");
        cft.ofms.push_back(std::move(ofm));
      } else {
        Fail(t, "expected 'event', 'gate', 'ifm' or 'ofm', got " + Describe(t));
      }
      EndOfLine();
    }
    return cft;
  }

  CmcElement ParseCmc() {
    CmcElement cmc;
    const std::size_t keyword = pos_ - 1;
    OpenBlock();
    std::set<std::string> states, modes;
    bool has_initial = false;
    while (!CloseBlock()) {
      const Token& t = Expect(Tok::kWord, "cmc statement");
      if (t.text == "states") {
        if (AtEndOfLine()) Fail(Peek(), "expected state ids");
        while (!AtEndOfLine()) {
          const Token& at = Peek();
          std::string s = StateId();
          Declare(states, at, s, "state");
          cmc.states.push_back(s);
        }
      } else if (t.text == "initial") {
        if (has_initial) Fail(t, "initial state declared twice");
        has_initial = true;
        cmc.initial = StateId();
      } else if (t.text == "error") {
        if (AtEndOfLine()) Fail(Peek(), "expected state ids");
        while (!AtEndOfLine()) cmc.error_states.push_back(StateId());
      } else if (t.text == "transition") {
        Transition tr;
        tr.from = StateId();
        Expect(Tok::kArrow, "'->'");
        tr.to = StateId();
        ExpectKeyword("rate");
        tr.rate = ParseRate();
        cmc.transitions.push_back(std::move(tr));
      } else if (t.text == "ifm") {
        const Token& at = Peek();
        std::string id = Identifier("input failure mode id");
        Declare(modes, at, id, "failure mode");
        cmc.ifms.push_back(ParseIfm(id));
      } else if (t.text == "ofm") {
        const Token& at = Peek();
        std::string id = Identifier("output failure mode id");
        Declare(modes, at, id, "failure mode");
        ExpectKeyword("on");
        cmc.ofms.push_back({id, Identifier("outport name")});
      } else if (t.text == "di") {
        InputDependency dep;
        dep.ifm = Identifier("input failure mode id");
        dep.from = StateId();
        Expect(Tok::kArrow, "'->'");
        dep.to = StateId();
        cmc.input_deps.push_back(std::move(dep));
      } else if (t.text == "do") {
        OutputDependency dep;
        dep.state = StateId();
        Expect(Tok::kArrow, "'->'");
        dep.ofm = Identifier("output failure mode id");
        cmc.output_deps.push_back(std::move(dep));
      } else {
        Fail(t, "expected 'states', 'initial', 'error', 'transition', 'ifm', "
                "'ofm', 'di' or 'do', got " + Describe(t));
      }
      EndOfLine();
    }
    if (!has_initial) Fail(tokens_[keyword], "cmc block has no 'initial' state");
    return cmc;
  }

  PortRef ParsePortRef() {
    const Token& t = Expect(Tok::kWord, "port reference");
    auto dot = t.text.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == t.text.size() ||
        !IsIdentifier(t.text))
      Fail(t, "expected 'component.port', got '" + t.text + "'");
    return {t.text.substr(0, dot), t.text.substr(dot + 1)};
  }

  void ParseConnections(SystemModel& system) {
    OpenBlock();
    while (!CloseBlock()) {
      Connection c;
      c.from = ParsePortRef();
      Expect(Tok::kArrow, "'->'");
      c.to = ParsePortRef();
      system.connections.push_back(std::move(c));
      EndOfLine();
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void WriteIfm(std::ostringstream& out, const InputFailureMode& ifm) {
  out << "    ifm " << ifm.id << " on " << ifm.port;
  if (!ifm.mode.empty()) out << " mode " << ifm.mode;
  out << "\n";
}

}  // namespace

ModelDocument parse_model(std::string_view text) { return Parser(text).Run(); }

ModelDocument read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::string shortest_decimal(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_rate(const Rate& rate, RateDisplay display) {
  bool fit = display == RateDisplay::kFit ||
             (display == RateDisplay::kAsWritten && rate.unit() == RateUnit::kFit);
  if (fit) return shortest_decimal(rate.fit()) + " FIT";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", rate.per_hour());
  return std::string(buf) + " /h";
}

std::string serialize_model(const ModelDocument& doc,
                            const SerializeOptions& options) {
  const SystemModel system = canonical(doc.system);
  std::ostringstream out;
  out << "ghcft " << doc.format_version << "\n";
  if (!doc.metadata.empty()) {
    out << "\nmetadata {\n";
    for (const auto& [key, value] : doc.metadata)
      out << "  " << key << " " << Quote(value) << "\n";
    out << "}\n";
  }
  auto rate = [&](const Rate& r) { return format_rate(r, options.rates); };
  for (const auto& component : system.components) {
    out << "\ncomponent " << component.id << " {\n";
    if (!component.inports.empty()) {
      out << "  inport";
      for (const auto& p : component.inports) out << " " << p;
      out << "\n";
    }
    if (!component.outports.empty()) {
      out << "  outport";
      for (const auto& p : component.outports) out << " " << p;
      out << "\n";
    }
    if (component.is_cft()) {
      const CftElement& cft = component.cft();
      out << "  cft {\n";
      for (const auto& e : cft.events) {
        out << "    event " << e.id << " rate " << rate(e.rate);
        if (e.rate.kind() == RateKind::kRepair) out << " repair";
        if (e.never_occurs) out << " never";
        out << "\n";
      }
      for (const auto& g : cft.gates) {
        out << "    gate " << g.id << " " << to_string(g.kind);
        for (const auto& input : g.inputs) out << " " << input;
        out << "\n";
      }
      for (const auto& ifm : cft.ifms) WriteIfm(out, ifm);
      for (const auto& ofm : cft.ofms)
        out << "    ofm " << ofm.id << " on " << ofm.port << " from "
            << ofm.input << "\n";
      out << "  }\n";
    } else {
      const CmcElement& cmc = component.cmc();
      out << "  cmc {\n";
      if (!cmc.states.empty()) {
        out << "    states";
        for (const auto& s : cmc.states) out << " " << s;
        out << "\n";
      }
      out << "    initial " << cmc.initial << "\n";
      if (!cmc.error_states.empty()) {
        out << "    error";
        for (const auto& s : cmc.error_states) out << " " << s;
        out << "\n";
      }
      for (const auto& t : cmc.transitions)
        out << "    transition " << t.from << " -> " << t.to << " rate "
            << rate(t.rate) << " " << to_string(t.rate.kind()) << "\n";
      for (const auto& ifm : cmc.ifms) WriteIfm(out, ifm);
      for (const auto& ofm : cmc.ofms)
        out << "    ofm " << ofm.id << " on " << ofm.port << "\n";
      for (const auto& d : cmc.input_deps)
        out << "    di " << d.ifm << " " << d.from << " -> " << d.to << "\n";
      for (const auto& d : cmc.output_deps)
        out << "    do " << d.state << " -> " << d.ofm << "\n";
      out << "  }\n";
    }
    out << "}\n";
  }
  if (!system.connections.empty()) {
    out << "\nconnections {\n";
    for (const auto& c : system.connections)
      out << "  " << c.from.component << "." << c.from.port << " -> "
          << c.to.component << "." << c.to.port << "\n";
    out << "}\n";
  }
  return out.str();
}

}  // namespace ghcft
