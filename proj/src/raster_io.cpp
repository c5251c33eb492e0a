#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sctmd/errors.hpp"
#include "sctmd/raster_io.hpp"

namespace sctmd {

static_assert(std::endian::native == std::endian::little, "raster I/O assumes a little-endian host");

namespace {

constexpr char kMagic[5] = {'S', 'C', 'T', 'R', '1'};

std::size_t dtype_size(DType t) { return t == DType::f64 ? 8 : 4; }

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& b, const std::string& source) : b_(b), source_(source) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    auto n = get<std::uint32_t>();
    need(n);
    std::string s(b_.begin() + pos_, b_.begin() + pos_ + n);
    pos_ += n;
    return s;
  }
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw InputError(source_ + ": truncated raster file");
  }
  std::size_t remaining() const { return b_.size() - pos_; }
  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  const std::vector<std::uint8_t>& b_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(DType t) {
  switch (t) {
    case DType::f32: return "f32";
    case DType::f64: return "f64";
    case DType::i32: return "i32";
  }
  return "?";
}

DType dtype_from_string(const std::string& s) {
  if (s == "f32") return DType::f32;
  if (s == "f64") return DType::f64;
  if (s == "i32") return DType::i32;
  throw InputError("unknown raster dtype '" + s + "'");
}

ImageStack Raster::stack() const {
  ImageStack s(width, height, channels);
  s.data = data;
  return s;
}

Raster Raster::from_stack(const ImageStack& s, DType dtype, std::string kind, nlohmann::json metadata) {
  Raster r;
  r.width = s.width;
  r.height = s.height;
  r.channels = s.channels;
  r.dtype = dtype;
  r.kind = std::move(kind);
  r.metadata = std::move(metadata);
  r.data = s.data;
  return r;
}

std::vector<std::uint8_t> encode_raster(const Raster& r) {
  const std::size_t n = std::size_t(r.width) * r.height * r.channels;
  if (r.width < 0 || r.height < 0 || r.channels < 0 || r.data.size() != n)
    throw InputError("raster '" + r.kind + "': payload size does not match its shape");
  std::vector<std::uint8_t> out(kMagic, kMagic + 5);
  put<std::uint32_t>(out, r.width);
  put<std::uint32_t>(out, r.height);
  put<std::uint32_t>(out, r.channels);
  put_string(out, to_string(r.dtype));
  put_string(out, r.kind);
  put_string(out, r.metadata.dump());
  out.reserve(out.size() + n * dtype_size(r.dtype));
  for (double v : r.data) {
    switch (r.dtype) {
      case DType::f64: put<double>(out, v); break;
      case DType::f32: put<float>(out, static_cast<float>(v)); break;
      case DType::i32:
        if (v != std::floor(v) || std::abs(v) > 2147483647.0)
          throw InputError("raster '" + r.kind + "': non-integer value in i32 payload");
        put<std::int32_t>(out, static_cast<std::int32_t>(v));
        break;
    }
  }
  return out;
}

Raster decode_raster(const std::vector<std::uint8_t>& bytes, const std::string& source) {
  if (bytes.size() < 5 || std::memcmp(bytes.data(), kMagic, 5) != 0)
    throw InputError(source + ": not an SCTR1 raster file");
  Reader in(bytes, source);
  in.skip(5);
  Raster r;
  r.width = static_cast<int>(in.get<std::uint32_t>());
  r.height = static_cast<int>(in.get<std::uint32_t>());
  r.channels = static_cast<int>(in.get<std::uint32_t>());
  r.dtype = dtype_from_string(in.get_string());
  r.kind = in.get_string();
  std::string meta = in.get_string();
  try {
    r.metadata = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(source + ": bad raster metadata: " + e.what());
  }
  const std::size_t n = std::size_t(r.width) * r.height * r.channels;
  if (in.remaining() != n * dtype_size(r.dtype))
    throw InputError(source + ": payload length does not match width*height*channels");
  r.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (r.dtype) {
      case DType::f64: r.data[i] = in.get<double>(); break;
      case DType::f32: r.data[i] = in.get<float>(); break;
      case DType::i32: r.data[i] = in.get<std::int32_t>(); break;
    }
  }
  return r;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw InputError("cannot write " + tmp.string());
    f.write(text.data(), std::streamsize(text.size()));
    if (!f) throw InputError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(f), {});
}

void write_raster(const std::filesystem::path& path, const Raster& r) {
  auto bytes = encode_raster(r);
  write_text_file(path, std::string(bytes.begin(), bytes.end()));
}

Raster read_raster(const std::filesystem::path& path) {
  std::string s = read_text_file(path);
  return decode_raster(std::vector<std::uint8_t>(s.begin(), s.end()), path.string());
}

}  // namespace sctmd
