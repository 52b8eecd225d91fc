#include "tmr/store.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <mutex>

#include "tmr/error.hpp"

namespace tmr {

namespace {

constexpr std::array<char, 8> kMagic = {'T', 'M', 'R', 'S', 'T', 'O', 'R', 'E'};
constexpr std::array<char, 8> kFooter = {'T', 'M', 'R', 'E', 'N', 'D', '\0', '\0'};
constexpr std::size_t kHeaderFixed = 40;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  template <typename T>
  void le(T v) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf_.push_back(static_cast<char>(u & 0xFF));
      u = static_cast<U>(u >> 8);
    }
  }
  void f32(float f) { le(std::bit_cast<std::uint32_t>(f)); }
  void str16(const std::string& s) {
    if (s.size() > 0xFFFF) throw ArgumentError("language tag too long");
    le(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void str32(const std::string& s) {
    if (s.size() > 0xFFFFFFFFu) throw ArgumentError("segment too long");
    le(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<char>& buffer() { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const std::vector<char>& buf, std::string name)
      : buf_(buf), name_(std::move(name)) {}

  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw IoError(name_ + ": truncated store file");
  }
  void bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, buf_.data() + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T le() {
    need(sizeof(T));
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<U>(static_cast<U>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i));
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
  std::string str16() { return str(le<std::uint16_t>()); }
  std::string str32() { return str(le<std::uint32_t>()); }
  std::size_t pos() const { return pos_; }
  std::size_t size() const { return buf_.size(); }

 private:
  std::string str(std::size_t n) {
    need(n);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }

  const std::vector<char>& buf_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

TranslationMemoryStore::TranslationMemoryStore(std::size_t dim, StoreMetadata metadata)
    : dim_(dim), metadata_(std::move(metadata)), mutex_(std::make_unique<std::shared_mutex>()) {
  if (dim == 0) throw ArgumentError("store dimension must be positive");
  if (dim > 0xFFFFFFFFu) throw ArgumentError("store dimension too large");
}

TranslationMemoryStore::TranslationMemoryStore(TranslationMemoryStore&&) noexcept = default;
TranslationMemoryStore& TranslationMemoryStore::operator=(TranslationMemoryStore&&) noexcept = default;
TranslationMemoryStore::~TranslationMemoryStore() = default;

std::size_t TranslationMemoryStore::size() const {
  std::shared_lock lock(*mutex_);
  return records_.size();
}

std::size_t TranslationMemoryStore::find_index(UnitId id) const {
  const auto it = std::lower_bound(
      records_.begin(), records_.end(), id,
      [](const MemoryRecord& r, UnitId v) { return r.unit.id < v; });
  if (it == records_.end() || it->unit.id != id) return records_.size();
  return static_cast<std::size_t>(it - records_.begin());
}

void TranslationMemoryStore::put(MemoryRecord record) {
  validate_unit(record.unit);
  if (record.vector && record.vector->dim() != dim_) {
    throw DimensionError(dim_, record.vector->dim());
  }
  std::unique_lock lock(*mutex_);
  if (!records_.empty() && record.unit.id <= records_.back().unit.id) {
    throw ConflictError("id " + std::to_string(record.unit.id) +
                        " is not greater than the last stored id " +
                        std::to_string(records_.back().unit.id));
  }
  records_.push_back(std::move(record));
}

void TranslationMemoryStore::set_vector(UnitId id, EmbeddingVector vector) {
  if (vector.dim() != dim_) throw DimensionError(dim_, vector.dim());
  std::unique_lock lock(*mutex_);
  const auto idx = find_index(id);
  if (idx == records_.size()) throw ArgumentError("no record with id " + std::to_string(id));
  records_[idx].vector = std::move(vector);
}

std::optional<MemoryRecord> TranslationMemoryStore::get(UnitId id) const {
  std::shared_lock lock(*mutex_);
  const auto idx = find_index(id);
  if (idx == records_.size()) return std::nullopt;
  return records_[idx];
}

void TranslationMemoryStore::scan(const std::function<void(const MemoryRecord&)>& visit) const {
  std::shared_lock lock(*mutex_);
  for (const auto& r : records_) visit(r);
}

void TranslationMemoryStore::read(
    const std::function<void(std::span<const MemoryRecord>)>& fn) const {
  std::shared_lock lock(*mutex_);
  fn(records_);
}

std::vector<MemoryRecord> TranslationMemoryStore::records() const {
  std::shared_lock lock(*mutex_);
  return records_;
}

void TranslationMemoryStore::save(const std::filesystem::path& path) const {
  Writer w;
  {
    std::shared_lock lock(*mutex_);
    w.bytes(kMagic.data(), kMagic.size());
    w.le(kFormatVersion);
    w.le(static_cast<std::uint32_t>(dim_));
    w.le(static_cast<std::uint64_t>(records_.size()));
    w.le(metadata_.created_unix);
    w.le(std::uint32_t{0});  // flags
    const auto meta_len = static_cast<std::uint32_t>(
        4 + metadata_.languages.source.size() + metadata_.languages.target.size());
    w.le(meta_len);
    w.str16(metadata_.languages.source);
    w.str16(metadata_.languages.target);

    for (const auto& r : records_) {
      w.le(static_cast<std::uint64_t>(r.unit.id));
      w.le(static_cast<std::uint32_t>(r.vector ? 1 : 0));
      w.le(std::uint32_t{0});
      for (std::size_t i = 0; i < dim_; ++i) {
        w.f32(r.vector ? static_cast<float>((*r.vector)[i]) : 0.0f);
      }
    }
    for (const auto& r : records_) {
      w.le(static_cast<std::uint64_t>(r.unit.id));
      w.str32(r.unit.source_text);
      w.str32(r.unit.target_text);
      w.str16(r.unit.source_lang);
      w.str16(r.unit.target_lang);
    }
    w.bytes(kFooter.data(), kFooter.size());
  }

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    const auto& buf = w.buffer();
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

TranslationMemoryStore TranslationMemoryStore::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());

  Reader r(buf, path.string());
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw IoError(path.string() + ": not a store file");
  const auto version = r.le<std::uint32_t>();
  if (version != kFormatVersion) {
    throw IoError(path.string() + ": unsupported store version " + std::to_string(version));
  }
  const auto dim = r.le<std::uint32_t>();
  const auto count = r.le<std::uint64_t>();
  StoreMetadata meta;
  meta.created_unix = r.le<std::int64_t>();
  r.le<std::uint32_t>();  // flags
  const auto meta_len = r.le<std::uint32_t>();
  const auto meta_start = r.pos();
  meta.languages.source = r.str16();
  meta.languages.target = r.str16();
  if (r.pos() - meta_start != meta_len || meta_start != kHeaderFixed) {
    throw IoError(path.string() + ": corrupt metadata block");
  }
  if (dim == 0) throw IoError(path.string() + ": zero dimension");
  const std::size_t record_width = 16 + 4 * static_cast<std::size_t>(dim);
  if (count > (r.size() - r.pos()) / record_width) {
    throw IoError(path.string() + ": truncated store file");
  }

  TranslationMemoryStore store(dim, meta);
  store.records_.resize(count);
  std::vector<float> values(dim);
  for (std::size_t i = 0; i < count; ++i) {
    auto& rec = store.records_[i];
    rec.unit.id = r.le<std::uint64_t>();
    const auto has_vector = r.le<std::uint32_t>();
    r.le<std::uint32_t>();
    for (auto& v : values) v = r.f32();
    if (has_vector) rec.vector = EmbeddingVector::from_floats(values);
  }
  for (std::size_t i = 0; i < count; ++i) {
    auto& rec = store.records_[i];
    const auto id = r.le<std::uint64_t>();
    if (id != rec.unit.id) throw IoError(path.string() + ": text/vector id mismatch");
    if (i > 0 && id <= store.records_[i - 1].unit.id) {
      throw IoError(path.string() + ": ids not strictly increasing");
    }
    rec.unit.source_text = r.str32();
    rec.unit.target_text = r.str32();
    rec.unit.source_lang = r.str16();
    rec.unit.target_lang = r.str16();
  }
  std::array<char, 8> footer{};
  r.bytes(footer.data(), footer.size());
  if (footer != kFooter || r.pos() != r.size()) {
    throw IoError(path.string() + ": missing end marker");
  }
  return store;
}

TranslationMemoryStore make_store(const std::vector<TranslationUnit>& units,
                                  std::size_t dim, StoreMetadata metadata) {
  std::vector<const TranslationUnit*> order;
  order.reserve(units.size());
  for (const auto& u : units) order.push_back(&u);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->id < b->id; });
  TranslationMemoryStore store(dim, std::move(metadata));
  for (const auto* u : order) store.put(MemoryRecord{*u, std::nullopt});
  return store;
}

}  // namespace tmr
