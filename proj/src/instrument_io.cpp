#include "locc/instrument_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "locc/errors.hpp"

namespace locc {

namespace {

double parse_real(std::string_view s, std::string_view whole) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ArgumentError(fmt::format("malformed complex entry '{}'", whole));
  }
  return v;
}

std::vector<std::string> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

}  // namespace

std::string format_complex(Complex z) {
  const double im = z.imag();
  if (std::signbit(im)) return fmt::format("{:.17g}-{:.17g}i", z.real(), -im);
  return fmt::format("{:.17g}+{:.17g}i", z.real(), im);
}

Complex parse_complex(std::string_view token) {
  if (token.empty()) throw ArgumentError("empty complex entry");
  if (token.back() != 'i') return {parse_real(token, token), 0.0};

  const std::string_view body = token.substr(0, token.size() - 1);
  // Split at the last sign that is not leading and not part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) return {0.0, parse_real(body, token)};
  const double re = parse_real(body.substr(0, split), token);
  std::string_view im_part = body.substr(split);
  const bool negative = im_part.front() == '-';
  im_part.remove_prefix(1);
  const double im = parse_real(im_part, token);
  return {re, negative ? -im : im};
}

std::string serialize_instrument(const QuantumInstrument& inst) {
  std::string out = fmt::format("instrument {}\n", inst.dimension());
  for (const auto& b : inst.branches()) {
    out += fmt::format("branch {}\n", b.outcome);
    for (std::size_t k = 0; k < b.kraus.size(); ++k) {
      if (b.weights.empty()) {
        out += "kraus\n";
      } else {
        out += fmt::format("kraus {:.17g}\n", b.weights[k]);
      }
      const auto& m = b.kraus[k];
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          if (c > 0) out += ' ';
          out += format_complex(m(r, c));
        }
        out += '\n';
      }
    }
  }
  return out;
}

QuantumInstrument parse_instrument(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> ArgumentError {
    return ArgumentError(fmt::format("instrument line {}: {}", line_no, msg));
  };

  long dimension = -1;
  std::vector<Branch> branches;
  ComplexMatrix* pending = nullptr;  // Kraus operator being filled
  Eigen::Index next_row = 0;

  for (std::string line; std::getline(is, line);) {
    ++line_no;
    const auto tok = tokenize(line);
    if (tok.empty()) continue;

    if (pending != nullptr && next_row < pending->rows()) {
      if (static_cast<long>(tok.size()) != dimension) {
        throw fail(fmt::format("expected {} entries, found {}", dimension, tok.size()));
      }
      try {
        for (Eigen::Index c = 0; c < dimension; ++c) {
          (*pending)(next_row, c) = parse_complex(tok[static_cast<std::size_t>(c)]);
        }
      } catch (const ArgumentError& e) {
        throw fail(e.what());
      }
      ++next_row;
      continue;
    }

    const auto& kw = tok.front();
    if (kw == "instrument") {
      if (dimension != -1) throw fail("repeated 'instrument' header");
      if (tok.size() != 2) throw fail("usage: instrument <dimension>");
      const auto [ptr, ec] = std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), dimension);
      if (ec != std::errc() || ptr != tok[1].data() + tok[1].size() || dimension < 1) {
        throw fail(fmt::format("bad dimension '{}'", tok[1]));
      }
    } else if (kw == "branch") {
      if (dimension < 1) throw fail("'branch' before 'instrument' header");
      if (tok.size() != 2) throw fail("usage: branch <label>");
      branches.push_back(Branch{tok[1], {}, {}});
      pending = nullptr;
    } else if (kw == "kraus") {
      if (branches.empty()) throw fail("'kraus' outside a branch");
      if (tok.size() > 2) throw fail("usage: kraus [weight]");
      auto& b = branches.back();
      const double w = tok.size() == 2 ? parse_real(tok[1], tok[1]) : 1.0;
      // Keep weights aligned with operators once any is non-unit.
      if (w != 1.0 && b.weights.empty()) b.weights.assign(b.kraus.size(), 1.0);
      if (!b.weights.empty()) b.weights.push_back(w);
      b.kraus.emplace_back(ComplexMatrix::Zero(dimension, dimension));
      pending = &b.kraus.back();
      next_row = 0;
    } else {
      throw fail(fmt::format("unexpected token '{}'", kw));
    }
  }
  if (pending != nullptr && next_row < pending->rows()) {
    throw fail("incomplete Kraus operator at end of input");
  }
  if (dimension < 1) throw ArgumentError("instrument text has no 'instrument' header");
  return QuantumInstrument(std::move(branches));
}

QuantumInstrument load_instrument(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError(fmt::format("cannot open instrument file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instrument(ss.str());
}

}  // namespace locc
