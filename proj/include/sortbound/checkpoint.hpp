#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sortbound/canonical.hpp"
#include "sortbound/error.hpp"

namespace sortbound {

enum class Phase : std::uint8_t { Forward = 0, Backward = 1 };

inline const char* to_string(Phase p) { return p == Phase::Forward ? "forward" : "backward"; }

/// Header of a checkpoint file; all integers little-endian.
///
///     offset  size  field
///     0       4     magic "SBND"
///     4       2     version (1)
///     6       1     n
///     7       1     C (comparison budget)
///     8       1     c (step index)
///     9       1     phase (0 forward, 1 backward)
///     10      8     count
///     18      33*count canonical codes, ascending byte order
///     ...     8     FNV-1a 64 checksum of the code bytes
struct CheckpointHeader {
    std::uint8_t n = 0;
    std::uint8_t budget = 0;
    std::uint8_t step = 0;
    Phase phase = Phase::Forward;
    std::uint64_t count = 0;
};

inline constexpr std::array<char, 4> kCheckpointMagic{'S', 'B', 'N', 'D'};
inline constexpr std::uint16_t kCheckpointVersion = 1;
inline constexpr std::size_t kCheckpointHeaderBytes = 18;

namespace detail {

struct Fnv1a {
    std::uint64_t h = 0xcbf29ce484222325ull;
    void add(const std::uint8_t* p, std::size_t len) {
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ull;
        }
    }
};

inline void put_le(std::uint8_t* out, std::uint64_t v, std::size_t bytes) {
    for (std::size_t i = 0; i < bytes; ++i) {
        out[i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
}

inline std::uint64_t get_le(const std::uint8_t* in, std::size_t bytes) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bytes; ++i) {
        v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    }
    return v;
}

}  // namespace detail

/// Streams codes into a checkpoint file. Codes must arrive in strictly ascending order.
class CheckpointWriter {
public:
    CheckpointWriter(const std::filesystem::path& path, CheckpointHeader header)
        : path_(path), tmp_(path.string() + ".part"), out_(tmp_, std::ios::binary | std::ios::trunc), header_(header) {
        if (!out_) {
            throw std::runtime_error("cannot write " + tmp_.string());
        }
        write_header();
    }

    void add(const CanonicalCode& code) {
        if (written_ > 0 && !(last_ < code)) {
            throw std::logic_error("checkpoint codes must be strictly ascending");
        }
        std::array<std::uint8_t, CanonicalCode::kBytes> buf{};
        code.to_bytes(buf.data());
        sum_.add(buf.data(), buf.size());
        out_.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        last_ = code;
        ++written_;
    }

    /// Patches the count, appends the checksum and renames into place.
    void finish() {
        std::array<std::uint8_t, 8> tail{};
        detail::put_le(tail.data(), sum_.h, 8);
        out_.write(reinterpret_cast<const char*>(tail.data()), 8);
        header_.count = written_;
        out_.seekp(0);
        write_header();
        out_.close();
        if (!out_) {
            throw std::runtime_error("write failed for " + tmp_.string());
        }
        std::filesystem::rename(tmp_, path_);
    }

private:
    void write_header() {
        std::array<std::uint8_t, kCheckpointHeaderBytes> h{};
        std::memcpy(h.data(), kCheckpointMagic.data(), 4);
        detail::put_le(h.data() + 4, kCheckpointVersion, 2);
        h[6] = header_.n;
        h[7] = header_.budget;
        h[8] = header_.step;
        h[9] = static_cast<std::uint8_t>(header_.phase);
        detail::put_le(h.data() + 10, header_.count, 8);
        out_.write(reinterpret_cast<const char*>(h.data()), static_cast<std::streamsize>(h.size()));
    }

    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    CheckpointHeader header_;
    detail::Fnv1a sum_;
    CanonicalCode last_{};
    std::uint64_t written_ = 0;
};

/// Sequential reader; validates header, order, length and checksum as it goes.
class CheckpointReader {
public:
    explicit CheckpointReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) {
            throw CheckpointError(0, "cannot open " + path.string());
        }
        std::array<std::uint8_t, kCheckpointHeaderBytes> h{};
        read_exact(h.data(), h.size(), "header");
        if (std::memcmp(h.data(), kCheckpointMagic.data(), 4) != 0) {
            throw CheckpointError(0, "bad magic");
        }
        if (detail::get_le(h.data() + 4, 2) != kCheckpointVersion) {
            throw CheckpointError(4, "unsupported version");
        }
        header_.n = h[6];
        header_.budget = h[7];
        header_.step = h[8];
        if (h[9] > 1) {
            throw CheckpointError(9, "bad phase");
        }
        header_.phase = static_cast<Phase>(h[9]);
        header_.count = detail::get_le(h.data() + 10, 8);
        if (header_.n < 1 || header_.n > kMaxElements) {
            throw CheckpointError(6, "element count out of range");
        }
    }

    const CheckpointHeader& header() const { return header_; }

    /// Next code, or false once all `count` codes are read and the checksum verified.
    bool next(CanonicalCode& out) {
        if (read_ == header_.count) {
            if (!verified_) {
                const std::size_t at = offset_;
                std::array<std::uint8_t, 8> tail{};
                read_exact(tail.data(), 8, "checksum");
                if (detail::get_le(tail.data(), 8) != sum_.h) {
                    throw CheckpointError(at, "checksum mismatch");
                }
                if (in_.peek() != std::char_traits<char>::eof()) {
                    throw CheckpointError(offset_, "trailing bytes");
                }
                verified_ = true;
            }
            return false;
        }
        const std::size_t at = offset_;
        std::array<std::uint8_t, CanonicalCode::kBytes> buf{};
        read_exact(buf.data(), buf.size(), "code");
        sum_.add(buf.data(), buf.size());
        out = CanonicalCode::from_bytes(buf.data());
        if (out.n != header_.n) {
            throw CheckpointError(at, "code element count differs from header");
        }
        if (read_ > 0 && !(last_ < out)) {
            throw CheckpointError(at, "codes not in ascending order");
        }
        last_ = out;
        ++read_;
        return true;
    }

private:
    void read_exact(std::uint8_t* p, std::size_t len, const char* what) {
        in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(len));
        const auto got = static_cast<std::size_t>(in_.gcount());
        if (got != len) {
            throw CheckpointError(offset_ + got, std::string("truncated ") + what);
        }
        offset_ += len;
    }

    std::ifstream in_;
    CheckpointHeader header_;
    detail::Fnv1a sum_;
    CanonicalCode last_{};
    std::uint64_t read_ = 0;
    std::size_t offset_ = 0;
    bool verified_ = false;
};

}  // namespace sortbound
