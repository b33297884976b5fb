// Copyright 2026 The Inextract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "inextract/toy_lm.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace inextract {
namespace {

constexpr std::uint64_t kSymbols = ToyLm::kVocabSize + 1;
constexpr char kFormatTag[] = "inextract-toy-lm";

void validate_options(const ToyLmOptions& options) {
  if (options.order > ToyLm::kMaxOrder) {
    throw std::invalid_argument("toy LM order must be <= 7");
  }
  if (!(options.alpha > 0.0) || !std::isfinite(options.alpha)) {
    throw std::invalid_argument("toy LM smoothing alpha must be > 0");
  }
}

}  // namespace

std::vector<TokenId> bytes_to_tokens(std::string_view text) {
  std::vector<TokenId> out;
  out.reserve(text.size());
  for (unsigned char c : text) out.push_back(c);
  return out;
}

std::string tokens_to_bytes(std::span<const TokenId> tokens) {
  std::string out;
  out.reserve(tokens.size());
  for (TokenId t : tokens) {
    if (t >= ToyLm::kVocabSize) {
      throw std::invalid_argument("token is not a byte value");
    }
    out.push_back(static_cast<char>(static_cast<unsigned char>(t)));
  }
  return out;
}

std::vector<std::vector<TokenId>> tokenize_lines(std::string_view corpus) {
  std::vector<std::vector<TokenId>> out;
  std::size_t start = 0;
  while (start <= corpus.size()) {
    std::size_t end = corpus.find('\n', start);
    if (end == std::string_view::npos) end = corpus.size();
    std::string_view line = corpus.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(bytes_to_tokens(line));
    start = end + 1;
  }
  return out;
}

ToyLm ToyLm::train(const std::vector<std::vector<TokenId>>& sequences,
                   ToyLmOptions options) {
  validate_options(options);
  ToyLm model(options.order, options.alpha);
  std::unordered_map<std::uint64_t, std::map<TokenId, std::uint64_t>> counts;
  std::size_t seen = 0;
  for (const auto& seq : sequences) {
    for (std::size_t t = 0; t < seq.size(); ++t) {
      if (seq[t] >= kVocabSize) {
        throw std::invalid_argument("toy LM tokens must be byte values");
      }
      const std::span<const TokenId> context(seq.data(), t);
      ++counts[model.context_key(context)][seq[t]];
      ++seen;
    }
  }
  if (seen == 0) throw Error("cannot train the toy LM on an empty corpus");
  for (auto& [key, by_token] : counts) {
    ContextCounts& entry = model.table_[key];
    for (const auto& [token, c] : by_token) {
      entry.counts.emplace_back(token, c);
      entry.total += c;
    }
  }
  return model;
}

ToyLm ToyLm::train_text(std::string_view corpus, ToyLmOptions options) {
  return train(tokenize_lines(corpus), options);
}

std::uint64_t ToyLm::context_key(std::span<const TokenId> context) const {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < order_; ++i) {
    // Symbol i of the window ending right before the next token.
    const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(context.size()) -
                               static_cast<std::ptrdiff_t>(order_) +
                               static_cast<std::ptrdiff_t>(i);
    const std::uint64_t symbol =
        pos < 0 ? kBos : static_cast<std::uint64_t>(context[static_cast<std::size_t>(pos)]);
    key = key * kSymbols + symbol;
  }
  return key;
}

std::vector<std::uint32_t> ToyLm::decode_key(std::uint64_t key) const {
  std::vector<std::uint32_t> symbols(order_);
  for (std::size_t i = order_; i-- > 0;) {
    symbols[i] = static_cast<std::uint32_t>(key % kSymbols);
    key /= kSymbols;
  }
  return symbols;
}

Eigen::VectorXd ToyLm::next_distribution(std::span<const TokenId> context) const {
  const auto vocab = static_cast<Eigen::Index>(kVocabSize);
  Eigen::VectorXd probs = Eigen::VectorXd::Constant(vocab, alpha_);
  double denom = alpha_ * static_cast<double>(kVocabSize);
  if (auto it = table_.find(context_key(context)); it != table_.end()) {
    for (const auto& [token, c] : it->second.counts) {
      probs[token] += static_cast<double>(c);
    }
    denom += static_cast<double>(it->second.total);
  }
  return probs / denom;
}

std::uint64_t ToyLm::count(std::span<const TokenId> context, TokenId token) const {
  auto it = table_.find(context_key(context));
  if (it == table_.end()) return 0;
  for (const auto& [t, c] : it->second.counts) {
    if (t == token) return c;
  }
  return 0;
}

std::string ToyLm::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = kFormatTag;
  doc["schema_version"] = 1;
  doc["order"] = order_;
  doc["alpha"] = alpha_;
  doc["vocab_size"] = kVocabSize;
  auto contexts = nlohmann::ordered_json::array();
  for (const auto& [key, entry] : table_) {
    nlohmann::ordered_json c;
    c["context"] = decode_key(key);
    auto counts = nlohmann::ordered_json::array();
    for (const auto& [token, n] : entry.counts) counts.push_back({token, n});
    c["counts"] = std::move(counts);
    contexts.push_back(std::move(c));
  }
  doc["contexts"] = std::move(contexts);
  return doc.dump() + "\n";
}

ToyLm ToyLm::from_json(std::string_view json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("toy LM file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormatTag) {
      throw ModelFormatError("not a toy LM file");
    }
    if (doc.at("vocab_size").get<std::size_t>() != kVocabSize) {
      throw ModelFormatError("toy LM vocab_size must be 256");
    }
    ToyLmOptions options{doc.at("order").get<std::size_t>(),
                         doc.at("alpha").get<double>()};
    validate_options(options);
    ToyLm model(options.order, options.alpha);
    for (const auto& c : doc.at("contexts")) {
      const auto symbols = c.at("context").get<std::vector<std::uint32_t>>();
      if (symbols.size() != model.order_) {
        throw ModelFormatError("context length does not match the model order");
      }
      std::uint64_t key = 0;
      for (auto s : symbols) {
        if (s > kBos) throw ModelFormatError("context symbol out of range");
        key = key * kSymbols + s;
      }
      ContextCounts entry;
      for (const auto& pair : c.at("counts")) {
        const auto token = pair.at(0).get<TokenId>();
        const auto n = pair.at(1).get<std::uint64_t>();
        if (token >= kVocabSize) throw ModelFormatError("count token out of range");
        if (!entry.counts.empty() && entry.counts.back().first >= token) {
          throw ModelFormatError("count tokens must be strictly ascending");
        }
        entry.counts.emplace_back(token, n);
        entry.total += n;
      }
      if (!model.table_.emplace(key, std::move(entry)).second) {
        throw ModelFormatError("duplicate context in toy LM file");
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("malformed toy LM file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(std::string("malformed toy LM file: ") + e.what());
  }
}

void ToyLm::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << to_json();
  if (!out) throw Error("failed writing " + path);
}

ToyLm ToyLm::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace inextract
