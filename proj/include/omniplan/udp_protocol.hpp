#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <vector>

#include "omniplan/clf.hpp"
#include "omniplan/geometry.hpp"

namespace omniplan {

/// Wire format: magic "CLF1", u32 little-endian sequence, then little-endian
/// f64 payload fields. Command datagrams carry (v_x, v_y, omega); pose
/// datagrams carry (x, y, theta, timestamp).
inline constexpr std::array<std::uint8_t, 4> kDatagramMagic{0x43, 0x4C, 0x46, 0x31};
inline constexpr std::size_t kCommandDatagramSize = 4 + 4 + 3 * 8;
inline constexpr std::size_t kPoseDatagramSize = 4 + 4 + 4 * 8;

namespace detail {

inline void put_u32le(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    buf.push_back(static_cast<std::uint8_t>(v & 0xFF));
    buf.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    buf.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    buf.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

inline void put_f64le(std::vector<std::uint8_t>& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline double get_f64le(const std::uint8_t* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

inline bool magic_ok(const std::uint8_t* p) {
    return std::memcmp(p, kDatagramMagic.data(), kDatagramMagic.size()) == 0;
}

}  // namespace detail

inline std::vector<std::uint8_t> udp_encode_command(const Command& cmd, std::uint32_t seq) {
    std::vector<std::uint8_t> buf;
    buf.reserve(kCommandDatagramSize);
    buf.insert(buf.end(), kDatagramMagic.begin(), kDatagramMagic.end());
    detail::put_u32le(buf, seq);
    detail::put_f64le(buf, cmd.v_x);
    detail::put_f64le(buf, cmd.v_y);
    detail::put_f64le(buf, cmd.omega);
    return buf;
}

struct CommandDatagram {
    Command command;
    std::uint32_t seq = 0;
};

inline std::optional<CommandDatagram> udp_decode_command(const std::uint8_t* data,
                                                         std::size_t size) {
    if (size != kCommandDatagramSize || !detail::magic_ok(data)) return std::nullopt;
    CommandDatagram out;
    out.seq = detail::get_u32le(data + 4);
    out.command.v_x = detail::get_f64le(data + 8);
    out.command.v_y = detail::get_f64le(data + 16);
    out.command.omega = detail::get_f64le(data + 24);
    return out;
}

struct PoseDatagram {
    Pose pose;
    double timestamp = 0.0;
    std::uint32_t seq = 0;
};

inline std::vector<std::uint8_t> udp_encode_pose(const Pose& pose, double timestamp,
                                                 std::uint32_t seq) {
    std::vector<std::uint8_t> buf;
    buf.reserve(kPoseDatagramSize);
    buf.insert(buf.end(), kDatagramMagic.begin(), kDatagramMagic.end());
    detail::put_u32le(buf, seq);
    detail::put_f64le(buf, pose.x);
    detail::put_f64le(buf, pose.y);
    detail::put_f64le(buf, pose.theta);
    detail::put_f64le(buf, timestamp);
    return buf;
}

inline std::optional<PoseDatagram> udp_decode_pose(const std::uint8_t* data, std::size_t size) {
    if (size != kPoseDatagramSize || !detail::magic_ok(data)) return std::nullopt;
    PoseDatagram out;
    out.seq = detail::get_u32le(data + 4);
    out.pose.x = detail::get_f64le(data + 8);
    out.pose.y = detail::get_f64le(data + 16);
    out.pose.theta = detail::get_f64le(data + 24);
    out.timestamp = detail::get_f64le(data + 32);
    return out;
}

/// Latest-wins filter: stale or duplicate sequence numbers are dropped.
class SequenceGate {
  public:
    bool accept(std::uint32_t seq) {
        if (has_last_ && seq <= last_) return false;
        has_last_ = true;
        last_ = seq;
        return true;
    }

  private:
    bool has_last_ = false;
    std::uint32_t last_ = 0;
};

}  // namespace omniplan
