#include "gaia/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <json.hpp>

#include "gaia/errors.hpp"
#include "gaia/hashing.hpp"

namespace gaia {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'G', 'A', 'I', 'A', 'C', 'K', 'P', 'T'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

void flatten_grads(const NetworkGrads& g, std::vector<double>& out) {
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    const auto w = g.weights[l].values();
    out.insert(out.end(), w.begin(), w.end());
    out.insert(out.end(), g.bias[l].begin(), g.bias[l].end());
  }
}

NetworkGrads unflatten_grads(const MlpNetwork& net, std::span<const double> flat) {
  NetworkGrads g = net.zero_grads();
  std::size_t at = 0;
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    auto w = g.weights[l].values();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), w.size(), w.begin());
    at += w.size();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), g.bias[l].size(), g.bias[l].begin());
    at += g.bias[l].size();
  }
  return g;
}

json layer_shapes(const MlpNetwork& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) {
    layers.push_back({{"in", l.in_dim()}, {"out", l.out_dim()}, {"activation", to_string(l.activation)}});
  }
  return layers;
}

MlpNetwork network_from_shapes(const json& layers, std::span<const double> flat) {
  std::vector<DenseLayer> out;
  std::size_t at = 0;
  for (const auto& l : layers) {
    DenseLayer d;
    const std::size_t in = l.at("in").get<std::size_t>();
    const std::size_t o = l.at("out").get<std::size_t>();
    d.activation = activation_from_string(l.at("activation").get<std::string>());
    if (at + in * o + o > flat.size()) throw CorruptionError("checkpoint: payload shorter than layer shapes");
    d.weights = Matrix(in, o, std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(at),
                                                  flat.begin() + static_cast<std::ptrdiff_t>(at + in * o)));
    at += in * o;
    d.bias.assign(flat.begin() + static_cast<std::ptrdiff_t>(at), flat.begin() + static_cast<std::ptrdiff_t>(at + o));
    at += o;
    out.push_back(std::move(d));
  }
  if (at != flat.size()) throw CorruptionError("checkpoint: payload size disagrees with layer shapes");
  return MlpNetwork(std::move(out));
}

}  // namespace

std::vector<std::string> network_names(const AnyModel& model) {
  if (std::holds_alternative<GaiaModel>(model)) {
    return {"generator.encoder", "generator.decoder", "discriminator.encoder", "discriminator.decoder"};
  }
  return {"encoder", "decoder"};
}

std::vector<const MlpNetwork*> networks(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> std::vector<const MlpNetwork*> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaiaModel>) {
          return {&m.generator.encoder, &m.generator.decoder, &m.discriminator.encoder, &m.discriminator.decoder};
        } else {
          return {&m.encoder, &m.decoder};
        }
      },
      model);
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  const auto nets = networks(ckpt.model);
  const auto names = network_names(ckpt.model);
  if (!ckpt.optimizers.empty() && ckpt.optimizers.size() != nets.size()) {
    throw Error("checkpoint: expected " + std::to_string(nets.size()) + " optimizer states, got " +
                std::to_string(ckpt.optimizers.size()));
  }

  std::vector<double> payload;
  json header;
  header["format_version"] = kCheckpointVersion;
  header["model_kind"] = to_string(kind_of(ckpt.model));
  header["step"] = ckpt.step;
  header["config"] = ckpt.config_snapshot;
  header["networks"] = json::array();
  for (std::size_t i = 0; i < nets.size(); ++i) {
    const auto flat = nets[i]->flatten();
    header["networks"].push_back({{"name", names[i]},
                                  {"layers", layer_shapes(*nets[i])},
                                  {"offset", payload.size()},
                                  {"count", flat.size()}});
    payload.insert(payload.end(), flat.begin(), flat.end());
  }
  header["optimizers"] = json::array();
  for (std::size_t i = 0; i < ckpt.optimizers.size(); ++i) {
    const AdamState& s = ckpt.optimizers[i];
    const std::size_t offset = payload.size();
    flatten_grads(s.first_moment(), payload);
    flatten_grads(s.second_moment(), payload);
    header["optimizers"].push_back({{"name", names[i]},
                                    {"step", s.step()},
                                    {"beta1", s.config().beta1},
                                    {"beta2", s.config().beta2},
                                    {"epsilon", s.config().epsilon},
                                    {"offset", offset},
                                    {"count", payload.size() - offset}});
  }

  std::string body;
  body.reserve(payload.size() * 8);
  for (double v : payload) put_u64(body, std::bit_cast<std::uint64_t>(v));
  header["payload_count"] = payload.size();
  header["payload_sha256"] = sha256_hex(body);

  const std::string head = header.dump();
  std::string out(kMagic, sizeof kMagic);
  put_u64(out, head.size());
  out += head;
  out += body;
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw CorruptionError("checkpoint: missing magic bytes");
  }
  const std::uint64_t head_len = get_u64(bytes.data() + 8);
  if (head_len > bytes.size() - 16) throw CorruptionError("checkpoint: truncated header");
  json header;
  try {
    header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(head_len));
  } catch (const json::exception& e) {
    throw CorruptionError(std::string("checkpoint: unreadable header: ") + e.what());
  }

  try {
    const auto version = header.at("format_version").get<std::uint32_t>();
    if (version != kCheckpointVersion) {
      throw IoError("checkpoint: format version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kCheckpointVersion) + ")");
    }
    const std::string body = bytes.substr(16 + head_len);
    const auto count = header.at("payload_count").get<std::size_t>();
    if (body.size() != count * 8) {
      throw CorruptionError("checkpoint: payload is " + std::to_string(body.size()) + " bytes, expected " +
                            std::to_string(count * 8));
    }
    if (sha256_hex(body) != header.at("payload_sha256").get<std::string>()) {
      throw CorruptionError("checkpoint: payload hash mismatch");
    }
    std::vector<double> payload(count);
    for (std::size_t i = 0; i < count; ++i) payload[i] = std::bit_cast<double>(get_u64(body.data() + 8 * i));
    const std::span<const double> all(payload);

    auto slice = [&](const json& entry) {
      const auto off = entry.at("offset").get<std::size_t>();
      const auto n = entry.at("count").get<std::size_t>();
      if (off > count || n > count - off) throw CorruptionError("checkpoint: section outside payload");
      return all.subspan(off, n);
    };

    std::vector<MlpNetwork> nets;
    for (const auto& n : header.at("networks")) nets.push_back(network_from_shapes(n.at("layers"), slice(n)));

    Checkpoint out;
    const ModelKind kind = model_kind_from_string(header.at("model_kind").get<std::string>());
    const std::size_t expected = kind == ModelKind::GAIA ? 4 : 2;
    if (nets.size() != expected) throw CorruptionError("checkpoint: wrong number of networks for model kind");
    switch (kind) {
      case ModelKind::AE: out.model = Autoencoder{std::move(nets[0]), std::move(nets[1])}; break;
      case ModelKind::VAE: out.model = VaeModel{std::move(nets[0]), std::move(nets[1])}; break;
      case ModelKind::GAIA:
        out.model = GaiaModel{Autoencoder{std::move(nets[0]), std::move(nets[1])},
                              Autoencoder{std::move(nets[2]), std::move(nets[3])}};
        break;
    }

    const auto restored = networks(out.model);
    const auto& opts = header.at("optimizers");
    if (!opts.empty() && opts.size() != restored.size()) throw CorruptionError("checkpoint: optimizer count mismatch");
    for (std::size_t i = 0; i < opts.size(); ++i) {
      const auto& o = opts[i];
      AdamConfig cfg{o.at("beta1").get<double>(), o.at("beta2").get<double>(), o.at("epsilon").get<double>()};
      const auto flat = slice(o);
      const std::size_t half = restored[i]->parameter_count();
      if (flat.size() != 2 * half) throw CorruptionError("checkpoint: optimizer state size mismatch");
      AdamState s(*restored[i], cfg);
      s.restore(unflatten_grads(*restored[i], flat.first(half)), unflatten_grads(*restored[i], flat.subspan(half)),
                o.at("step").get<std::uint64_t>());
      out.optimizers.push_back(std::move(s));
    }
    out.step = header.at("step").get<std::uint64_t>();
    out.config_snapshot = header.at("config").get<std::string>();
    return out;
  } catch (const json::exception& e) {
    throw CorruptionError(std::string("checkpoint: malformed header: ") + e.what());
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw CorruptionError(std::string("checkpoint: inconsistent contents: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) { return deserialize_checkpoint(read_file(path)); }

Checkpoint load_checkpoint(const std::string& path, ModelKind kind, const ArchitectureConfig& arch) {
  Checkpoint ckpt = load_checkpoint(path);
  if (kind_of(ckpt.model) != kind) {
    throw DimensionError("checkpoint holds a " + to_string(kind_of(ckpt.model)) + " model, expected " +
                         to_string(kind));
  }
  const AnyModel reference = build(kind, arch, 0);
  const auto want = networks(reference);
  const auto have = networks(ckpt.model);
  const auto names = network_names(reference);
  for (std::size_t i = 0; i < want.size(); ++i) {
    const auto a = want[i]->widths();
    const auto b = have[i]->widths();
    if (a != b) {
      auto show = [](const std::vector<std::size_t>& w) {
        std::string s = "[";
        for (std::size_t j = 0; j < w.size(); ++j) s += (j ? "," : "") + std::to_string(w[j]);
        return s + "]";
      };
      throw DimensionError("checkpoint shape mismatch in " + names[i] + ": expected widths " + show(a) +
                           ", file has " + show(b));
    }
  }
  return ckpt;
}

}  // namespace gaia
