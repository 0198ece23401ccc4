#include "coagfrag/spec_parse.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "coagfrag/errors.hpp"

namespace coagfrag {

namespace {

struct KeyValue {
  std::string key;
  std::string value;
};

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = text.find(sep, pos);
    out.push_back(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

KeyValue split_key_value(std::string_view token, std::string_view context) {
  const std::size_t eq = token.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw DomainError(fmt::format("{}: expected key=value, got '{}'", context, token));
  return {std::string(token.substr(0, eq)), std::string(token.substr(eq + 1))};
}

/// Index of the ')' matching the '(' at `open`.
std::size_t matching_paren(std::string_view text, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')' && --depth == 0) return i;
  }
  throw DomainError(fmt::format("unbalanced parentheses in '{}'", text));
}

/// Last ';' outside any parentheses.
std::size_t top_level_semicolon(std::string_view text) {
  int depth = 0;
  std::size_t found = std::string_view::npos;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    if (text[i] == ';' && depth == 0) found = i;
  }
  return found;
}

std::vector<std::string> model_keys(std::string_view family) {
  if (family == "gamma") return {"nu"};
  if (family == "stable") return {"alpha"};
  if (family == "linnik") return {"nu", "alpha"};
  throw DomainError(fmt::format("unknown model family '{}'", family));
}

LevyModel build_plain_model(std::string_view family, const std::map<std::string, double>& p) {
  if (family == "gamma") return gamma_model(p.at("nu"));
  if (family == "stable") return stable_model(p.at("alpha"));
  return linnik_model(p.at("nu"), p.at("alpha"), LinnikCumulantMethod::Exact);
}

/// Parses a model at the front of `tokens` (comma-split), consuming what it
/// uses. Wrapped models occupy one token; plain models take their keys.
LevyModel take_model(std::vector<std::string_view>& tokens, std::string_view first) {
  const std::size_t colon = first.find(':');
  if (first.starts_with("compose(") || first.starts_with("rescale(")) {
    tokens.erase(tokens.begin());
    return parse_model(first);
  }
  if (colon == std::string_view::npos) throw DomainError(fmt::format("model '{}' lacks 'family:'", first));
  const std::string_view family = first.substr(0, colon);
  std::vector<std::string> need = model_keys(family);
  tokens.front() = first.substr(colon + 1);
  std::map<std::string, double> params;
  for (auto it = tokens.begin(); it != tokens.end() && params.size() < need.size();) {
    const KeyValue kv = split_key_value(*it, family);
    const bool wanted = std::find(need.begin(), need.end(), kv.key) != need.end() && !params.contains(kv.key);
    if (wanted) {
      params[kv.key] = parse_number(kv.value, kv.key);
      it = tokens.erase(it);
    } else {
      ++it;
    }
  }
  for (const auto& k : need)
    if (!params.contains(k)) throw DomainError(fmt::format("model '{}' is missing '{}'", family, k));
  return build_plain_model(family, params);
}

/// Comma split that keeps a parenthesized model value in one token.
std::vector<std::string_view> split_law_tokens(std::string_view body) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::string_view rest = body.substr(pos);
    const std::size_t eq = rest.find('=');
    // levy=compose(...) holds commas inside parentheses.
    const std::string_view value = eq == std::string_view::npos ? std::string_view{} : rest.substr(eq + 1);
    if (value.starts_with("compose(") || value.starts_with("rescale(")) {
      const std::size_t close = matching_paren(rest, eq + 1 + std::string_view("compose").size());
      out.push_back(rest.substr(0, close + 1));
      pos += close + 2;
      if (close + 1 < rest.size() && rest[close + 1] != ',')
        throw DomainError(fmt::format("unexpected text after ')' in '{}'", body));
      continue;
    }
    const std::size_t comma = rest.find(',');
    out.push_back(rest.substr(0, comma));
    if (comma == std::string_view::npos) break;
    pos += comma + 1;
  }
  return out;
}

}  // namespace

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw DomainError(fmt::format("{}: '{}' is not a number", what, text));
  return v;
}

LevyModel parse_model(std::string_view text) {
  for (std::string_view wrapper : {"compose", "rescale"}) {
    if (!text.starts_with(wrapper) || text.size() <= wrapper.size() || text[wrapper.size()] != '(') continue;
    const std::size_t close = matching_paren(text, wrapper.size());
    if (close + 1 != text.size()) throw DomainError(fmt::format("unexpected text after ')' in '{}'", text));
    const std::string_view inner = text.substr(wrapper.size() + 1, close - wrapper.size() - 1);
    const std::size_t semi = top_level_semicolon(inner);
    if (semi == std::string_view::npos) throw DomainError(fmt::format("{}: expected '<model>;key=value'", text));
    const LevyModel base = parse_model(inner.substr(0, semi));
    const KeyValue kv = split_key_value(inner.substr(semi + 1), wrapper);
    const std::string_view expected = wrapper == "compose" ? "alpha" : "c";
    if (kv.key != expected) throw DomainError(fmt::format("{}: expected '{}=', got '{}='", wrapper, expected, kv.key));
    const double x = parse_number(kv.value, kv.key);
    return wrapper == "compose" ? alpha_compose(base, x) : rescale(base, x);
  }
  std::vector<std::string_view> tokens = split(text, ',');
  const LevyModel model = take_model(tokens, tokens.front());
  if (!tokens.empty()) throw DomainError(fmt::format("model '{}': unused parameter '{}'", text, tokens.front()));
  return model;
}

EppfSpec parse_eppf(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) throw DomainError(fmt::format("law '{}' lacks 'kind:'", text));
  const std::string_view kind = text.substr(0, colon);
  std::vector<std::string_view> tokens = split_law_tokens(text.substr(colon + 1));

  std::optional<LevyModel> model;
  std::map<std::string, double> params;
  while (!tokens.empty()) {
    const std::string_view token = tokens.front();
    if (token.starts_with("levy=")) {
      if (model) throw DomainError(fmt::format("law '{}': levy given twice", text));
      tokens.front() = token.substr(5);
      model = take_model(tokens, tokens.front());
      continue;
    }
    const KeyValue kv = split_key_value(token, kind);
    if (params.contains(kv.key)) throw DomainError(fmt::format("law '{}': '{}' given twice", text, kv.key));
    params[kv.key] = parse_number(kv.value, kv.key);
    tokens.erase(tokens.begin());
  }

  auto require = [&](std::initializer_list<const char*> keys, bool needs_model) {
    for (const char* k : keys)
      if (!params.contains(k)) throw DomainError(fmt::format("law '{}' is missing '{}'", text, k));
    if (params.size() != keys.size())
      throw DomainError(fmt::format("law '{}' has unexpected parameters", text));
    if (needs_model != model.has_value())
      throw DomainError(fmt::format("law '{}': {}", text, needs_model ? "missing levy=" : "unexpected levy="));
  };
  if (kind == "pd") {
    require({"alpha", "theta"}, false);
    return EppfSpec::pd(params["alpha"], params["theta"]);
  }
  if (kind == "pk") {
    require({}, true);
    return EppfSpec::pk(*model);
  }
  if (kind == "pk_tilted") {
    require({"theta"}, true);
    return EppfSpec::pk_tilted(*model, params["theta"]);
  }
  if (kind == "ps") {
    require({"alpha", "theta"}, true);
    return EppfSpec::ps(*model, params["alpha"], params["theta"]);
  }
  if (kind == "linnik") {
    require({"nu", "alpha", "theta"}, false);
    return EppfSpec::linnik(params["nu"], params["alpha"], params["theta"]);
  }
  throw DomainError(fmt::format("unknown law kind '{}'", kind));
}

}  // namespace coagfrag
