#include "ptsee/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ptsee/dataset.hpp"

namespace ptsee {

using json = nlohmann::json;

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::logistic: return "logistic";
    case Activation::identity: return "identity";
  }
  return "relu";
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "logistic" || s == "sigmoid") return Activation::logistic;
  if (s == "identity" || s == "linear") return Activation::identity;
  throw ParameterError("unknown activation '" + s + "'");
}

DenseMatrix forward_variant(const EmbeddingModel& model, const DenseMatrix& x) {
  if (const auto* h = std::get_if<HighOrderNet<double>>(&model)) return forward_high_order(*h, x);
  return forward_ffn(std::get<FeedForwardNet<double>>(model), x);
}

Index input_dim(const EmbeddingModel& model) {
  return std::visit([](const auto& m) { return m.input_dim(); }, model);
}

Index output_dim(const EmbeddingModel& model) {
  return std::visit([](const auto& m) { return m.output_dim(); }, model);
}

std::string model_kind(const EmbeddingModel& model) {
  return std::holds_alternative<HighOrderNet<double>>(model) ? "high_order" : "feedforward";
}

namespace {

constexpr const char* kFormat = "ptsee-checkpoint";

void append_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k) {
    out.push_back(static_cast<char>(bits & 0xFF));
    bits >>= 8;
  }
}

double read_le(const char* p) {
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | static_cast<unsigned char>(p[k]);
  return std::bit_cast<double>(bits);
}

template <class Model>
std::string encode(const Model& model, json header) {
  json blocks = json::array();
  for (const auto& b : model.block_info()) blocks.push_back({{"name", b.name}, {"rows", b.rows}, {"cols", b.cols}});
  header["blocks"] = blocks;
  std::string out = header.dump() + "\n";
  Model copy = model;
  for (auto span : copy.blocks()) {
    for (double v : span) append_le(out, v);
  }
  return out;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  json header;
  header["format"] = kFormat;
  header["version"] = 1;
  header["kind"] = model_kind(ckpt.model);
  header["method"] = ckpt.method;
  header["seed"] = ckpt.seed;
  header["input_dim"] = input_dim(ckpt.model);
  header["output_dim"] = output_dim(ckpt.model);
  if (const auto* net = std::get_if<HighOrderNet<double>>(&ckpt.model)) {
    header["order"] = net->order;
    header["factors"] = net->factors();
    header["hidden_units"] = net->hidden_units();
    return encode(*net, header);
  }
  const auto& net = std::get<FeedForwardNet<double>>(ckpt.model);
  header["layer_dims"] = net.layer_dims;
  header["activation"] = to_string(net.hidden_activation);
  return encode(net, header);
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos) throw FormatError("checkpoint has no header line");
  json header;
  try {
    header = json::parse(bytes.substr(0, newline));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  if (header.value("format", "") != kFormat) throw FormatError("not a ptsee checkpoint");

  Checkpoint ckpt;
  ckpt.method = header.value("method", "");
  ckpt.seed = header.value("seed", std::uint64_t{0});
  const std::string kind = header.value("kind", "");
  try {
    if (kind == "high_order") {
      ckpt.model = HighOrderNet<double>::zeros(header.at("input_dim"), header.at("factors"),
                                               header.at("hidden_units"), header.at("output_dim"),
                                               header.at("order"));
    } else if (kind == "feedforward") {
      ckpt.model = FeedForwardNet<double>::zeros(header.at("layer_dims").get<std::vector<Index>>(),
                                                 parse_activation(header.at("activation")));
    } else {
      throw FormatError("unknown model kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("incomplete checkpoint header: ") + e.what());
  }

  const char* p = bytes.data() + newline + 1;
  const char* end = bytes.data() + bytes.size();
  std::visit(
      [&](auto& net) {
        const auto info = net.block_info();
        const auto& declared = header.at("blocks");
        if (declared.size() != info.size()) throw FormatError("checkpoint block count mismatch");
        auto spans = net.blocks();
        for (std::size_t k = 0; k < spans.size(); ++k) {
          if (declared[k].value("name", "") != info[k].name || declared[k].value("rows", Index{-1}) != info[k].rows ||
              declared[k].value("cols", Index{-1}) != info[k].cols) {
            throw FormatError("checkpoint block " + std::to_string(k) + " does not match the model");
          }
          if (static_cast<std::size_t>(end - p) < spans[k].size() * 8) throw FormatError("truncated checkpoint");
          for (auto& v : spans[k]) {
            v = read_le(p);
            p += 8;
          }
        }
      },
      ckpt.model);
  if (p != end) throw FormatError("trailing bytes after checkpoint parameters");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace ptsee
