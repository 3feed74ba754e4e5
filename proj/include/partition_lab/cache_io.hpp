#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "big_int.hpp"
#include "counting.hpp"

namespace partition_lab {

/// On-disk CountCache columns, one file "column_m<m>.plcc" per part bound m.
///
/// Layout, all integers little-endian:
///   4 bytes   magic "PLCC"
///   u32       format version (1)
///   u64       m
///   u64       number of values (|P_x(m)| for x = 0 .. count-1)
///   per value: u64 limb count L, then L u64 limbs, least significant first
inline constexpr std::uint32_t cache_format_version = 1;

/// Directory named by PARTITION_LAB_CACHE_DIR, if set and nonempty.
inline std::optional<std::filesystem::path> cache_dir_from_env()
{
    char const* v = std::getenv("PARTITION_LAB_CACHE_DIR");
    if (v == nullptr || *v == '\0')
        return std::nullopt;
    return std::filesystem::path(v);
}

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v)
{
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i)
        b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<char const*>(b.data()), 8);
}

inline std::uint64_t get_u64(std::istream& is)
{
    std::array<unsigned char, 8> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 8))
        throw std::runtime_error("cache file truncated");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
}

inline std::filesystem::path column_file(std::filesystem::path const& dir, std::int64_t m)
{
    return dir / ("column_m" + std::to_string(m) + ".plcc");
}

}  // namespace detail

inline void write_column(std::ostream& os, std::int64_t m, CountCache::Column const& col)
{
    os.write("PLCC", 4);
    std::uint32_t const ver = cache_format_version;
    for (int i = 0; i < 4; ++i)
        os.put(static_cast<char>(ver >> (8 * i)));
    detail::put_u64(os, static_cast<std::uint64_t>(m));
    detail::put_u64(os, col.size());
    std::vector<std::uint64_t> limbs;
    for (auto const& v : col) {
        std::size_t const count = (mpz_sizeinbase(v.get_mpz_t(), 2) + 63) / 64;
        limbs.assign(count, 0);
        std::size_t written = 0;
        if (sgn(v) != 0)
            mpz_export(limbs.data(), &written, -1, sizeof(std::uint64_t), 0, 0, v.get_mpz_t());
        limbs.resize(written);
        detail::put_u64(os, limbs.size());
        for (auto limb : limbs)
            detail::put_u64(os, limb);
    }
}

inline std::pair<std::int64_t, CountCache::Column> read_column(std::istream& is)
{
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), 4) || std::string(magic.data(), 4) != "PLCC")
        throw std::runtime_error("not a count cache file");
    std::uint32_t ver = 0;
    for (int i = 0; i < 4; ++i) {
        int const c = is.get();
        if (c == EOF)
            throw std::runtime_error("cache file truncated");
        ver |= static_cast<std::uint32_t>(c) << (8 * i);
    }
    if (ver != cache_format_version)
        throw std::runtime_error("unsupported cache format version " + std::to_string(ver));
    auto const m = static_cast<std::int64_t>(detail::get_u64(is));
    std::uint64_t const count = detail::get_u64(is);
    CountCache::Column col;
    col.reserve(count);
    std::vector<std::uint64_t> limbs;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t const len = detail::get_u64(is);
        if (len > (std::uint64_t{1} << 24))
            throw std::runtime_error("cache file corrupt: limb count " + std::to_string(len));
        limbs.resize(len);
        for (auto& limb : limbs)
            limb = detail::get_u64(is);
        BigInt v;
        if (len > 0)
            mpz_import(v.get_mpz_t(), len, -1, sizeof(std::uint64_t), 0, 0, limbs.data());
        col.push_back(std::move(v));
    }
    return {m, std::move(col)};
}

/// Load every column file in dir into the cache. Unreadable files are
/// skipped; returns the number of columns adopted.
inline std::size_t load_cache(std::filesystem::path const& dir, CountCache& cache)
{
    std::size_t loaded = 0;
    if (!std::filesystem::is_directory(dir))
        return 0;
    for (auto const& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".plcc")
            continue;
        std::ifstream is(entry.path(), std::ios::binary);
        try {
            auto [m, col] = read_column(is);
            cache.adopt_column(m, std::move(col));
            ++loaded;
        } catch (std::runtime_error const&) {
            continue;
        }
    }
    return loaded;
}

/// Write columns that are longer than what dir already holds.
inline std::size_t save_cache(std::filesystem::path const& dir, CountCache const& cache)
{
    std::filesystem::create_directories(dir);
    std::size_t written = 0;
    for (auto const& [m, col] : cache.columns()) {
        auto const path = detail::column_file(dir, m);
        if (std::filesystem::exists(path)) {
            std::ifstream is(path, std::ios::binary);
            try {
                if (read_column(is).second.size() >= col.size())
                    continue;
            } catch (std::runtime_error const&) {
            }
        }
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            if (!os)
                throw std::runtime_error("cannot write " + tmp.string());
            write_column(os, m, col);
        }
        std::filesystem::rename(tmp, path);
        ++written;
    }
    return written;
}

}  // namespace partition_lab
