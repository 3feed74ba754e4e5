#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace partition_lab {

/// A partition of n into at most m_cap positive parts, stored nonincreasing.
///
/// The empty partition represents n = 0.
class Partition
{
  public:
    Partition() = default;

    Partition(std::vector<std::int64_t> parts, std::int64_t m_cap)
        : parts_(std::move(parts)), m_cap_(m_cap)
    {
        validate();
    }

    std::span<std::int64_t const> parts() const noexcept { return parts_; }
    std::int64_t n() const noexcept { return n_; }
    std::int64_t m_cap() const noexcept { return m_cap_; }
    std::size_t length() const noexcept { return parts_.size(); }
    bool empty() const noexcept { return parts_.empty(); }

    /// Largest part, or 0 for the empty partition.
    std::int64_t largest() const noexcept { return parts_.empty() ? 0 : parts_.front(); }

    /// Part i (0-based) with implicit zero padding up to m_cap.
    std::int64_t part_or_zero(std::size_t i) const noexcept
    {
        return i < parts_.size() ? parts_[i] : 0;
    }

    friend bool operator==(Partition const& a, Partition const& b)
    {
        return a.parts_ == b.parts_ && a.m_cap_ == b.m_cap_;
    }
    friend auto operator<=>(Partition const& a, Partition const& b)
    {
        return a.parts_ <=> b.parts_;
    }

    std::string to_string() const
    {
        std::string s = "(";
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i)
                s += ",";
            s += std::to_string(parts_[i]);
        }
        return s + ")";
    }

  private:
    void validate()
    {
        if (m_cap_ < 0)
            throw std::invalid_argument("Partition: negative m_cap");
        if (static_cast<std::int64_t>(parts_.size()) > m_cap_)
            throw std::invalid_argument("Partition: more parts than m_cap");
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (parts_[i] < 1)
                throw std::invalid_argument("Partition: parts must be positive");
            if (i + 1 < parts_.size() && parts_[i] < parts_[i + 1])
                throw std::invalid_argument("Partition: parts must be nonincreasing");
        }
        n_ = std::accumulate(parts_.begin(), parts_.end(), std::int64_t{0});
    }

    std::vector<std::int64_t> parts_;
    std::int64_t n_ = 0;
    std::int64_t m_cap_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Partition const& p)
{
    return os << p.to_string();
}

}  // namespace partition_lab
