#include "tgat/model/checkpoint.hpp"

#include <cstring>

#include "tgat/binary_io.hpp"
#include "tgat/error.hpp"

namespace tgat::model {

namespace {

constexpr char kMagic[] = "TGATCKPT1\n";
constexpr std::size_t kMagicLen = sizeof(kMagic) - 1;

nlohmann::json entry(const std::string& name, const Tensor& t) { return {{"name", name}, {"shape", t.shape()}}; }

void read_into(std::istream& is, const nlohmann::json& e, const std::string& name, Tensor& dst) {
  if (e.at("name").get<std::string>() != name)
    throw DataError("checkpoint: expected tensor '" + name + "', found '" + e.at("name").get<std::string>() + "'");
  const auto shape = e.at("shape").get<numerics::Shape>();
  if (shape != dst.shape())
    throw DataError("checkpoint: tensor '" + name + "' has shape " + numerics::shape_str(shape) +
                    ", config implies " + numerics::shape_str(dst.shape()));
  binary::read_f64(is, {dst.ptr(), dst.numel()});
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json m;
  m["format"] = 1;
  m["config"] = to_json(ckpt.config);
  m["seed"] = ckpt.seed;
  m["extra"] = ckpt.extra;
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : ckpt.params.tensors) tensors.push_back(entry(t.name, t.value));
  for (std::size_t s = 0; s < 3; ++s) {
    tensors.push_back(entry("enc.bn" + std::to_string(s + 1) + ".running_mean", ckpt.params.bn[s].running_mean));
    tensors.push_back(entry("enc.bn" + std::to_string(s + 1) + ".running_var", ckpt.params.bn[s].running_var));
  }
  m["tensors"] = std::move(tensors);
  const std::string manifest = m.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os = binary::open_out(path);
  os.write(kMagic, static_cast<std::streamsize>(kMagicLen));
  binary::write_u64(os, manifest.size());
  os.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  for (const auto& t : ckpt.params.tensors) binary::write_f64(os, t.value.data());
  for (const auto& bn : ckpt.params.bn) {
    binary::write_f64(os, bn.running_mean.data());
    binary::write_f64(os, bn.running_var.data());
  }
  if (!os) throw IoError("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is = binary::open_in(path);
  char magic[kMagicLen];
  if (!is.read(magic, kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0)
    throw DataError("'" + path.string() + "' is not a checkpoint");

  Checkpoint c;
  try {
    const std::uint64_t len = binary::read_u64(is);
    if (len > (1u << 26)) throw DataError("checkpoint: implausible manifest length");
    std::string text(len, '\0');
    if (!is.read(text.data(), static_cast<std::streamsize>(len))) throw DataError("checkpoint: truncated manifest");
    const nlohmann::json m = nlohmann::json::parse(text);
    if (m.at("format").get<int>() != 1) throw DataError("checkpoint: unsupported format");
    c.config = model_config_from_json(m.at("config"));
    c.seed = m.at("seed").get<std::uint64_t>();
    c.extra = m.at("extra");
    c.params = ModelParams::init(c.config, 0);

    const auto& tensors = m.at("tensors");
    const std::size_t expected = c.params.tensors.size() + 6;
    if (tensors.size() != expected)
      throw DataError("checkpoint: " + std::to_string(tensors.size()) + " tensors, config implies " +
                      std::to_string(expected));
    std::size_t k = 0;
    for (auto& t : c.params.tensors) read_into(is, tensors[k++], t.name, t.value);
    for (std::size_t s = 0; s < 3; ++s) {
      const std::string n = "enc.bn" + std::to_string(s + 1);
      read_into(is, tensors[k++], n + ".running_mean", c.params.bn[s].running_mean);
      read_into(is, tensors[k++], n + ".running_var", c.params.bn[s].running_var);
    }
    if (is.peek() != std::char_traits<char>::eof()) throw DataError("checkpoint: trailing bytes");
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint '" + path.string() + "': malformed manifest: " + e.what());
  } catch (const ConfigError& e) {
    throw DataError("checkpoint '" + path.string() + "': " + e.what());
  }
  return c;
}

}  // namespace tgat::model
