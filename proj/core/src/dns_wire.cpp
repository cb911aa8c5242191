#include "blockscope/dns_wire.hpp"

#include "blockscope/url.hpp"

namespace blockscope::dns {
namespace {

constexpr int kMaxPointerJumps = 32;

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    put16(out, static_cast<std::uint16_t>(v >> 16));
    put16(out, static_cast<std::uint16_t>(v & 0xffff));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> wire) : wire_(wire) {}

    std::uint8_t u8() {
        need(1);
        return wire_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>((wire_[pos_] << 8) | wire_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        const std::uint32_t hi = u16();
        return (hi << 16) | u16();
    }
    void skip(std::size_t n) {
        need(n);
        pos_ += n;
    }
    std::size_t pos() const { return pos_; }

    std::string name() {
        std::string out;
        std::size_t cursor = pos_;
        bool jumped = false;
        int jumps = 0;
        std::size_t total = 0;
        for (;;) {
            if (cursor >= wire_.size()) throw ParseError("name runs past end of message");
            const std::uint8_t len = wire_[cursor];
            if ((len & 0xc0) == 0xc0) {
                if (cursor + 1 >= wire_.size()) throw ParseError("truncated compression pointer");
                if (++jumps > kMaxPointerJumps) throw ParseError("compression pointer loop");
                const std::size_t target = static_cast<std::size_t>((len & 0x3f) << 8) | wire_[cursor + 1];
                if (!jumped) pos_ = cursor + 2;
                jumped = true;
                if (target >= wire_.size()) throw ParseError("compression pointer out of range");
                cursor = target;
                continue;
            }
            if (len & 0xc0) throw ParseError("unsupported label type");
            if (len == 0) {
                if (!jumped) pos_ = cursor + 1;
                break;
            }
            if (cursor + 1 + len > wire_.size()) throw ParseError("label runs past end of message");
            total += len + 1u;
            if (total > 255) throw ParseError("name longer than 255 octets");
            if (!out.empty()) out.push_back('.');
            out.append(reinterpret_cast<const char*>(&wire_[cursor + 1]), len);
            cursor += 1u + len;
        }
        return to_lower(out);
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > wire_.size()) throw ParseError("message truncated");
    }

    std::span<const std::uint8_t> wire_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_name(std::string_view name) {
    std::vector<std::uint8_t> out;
    if (name.ends_with('.')) name.remove_suffix(1);
    std::size_t pos = 0;
    while (!name.empty() && pos <= name.size()) {
        std::size_t end = name.find('.', pos);
        if (end == std::string_view::npos) end = name.size();
        const std::size_t len = end - pos;
        if (len == 0 || len > 63) throw ParseError("invalid label in '" + std::string(name) + "'");
        out.push_back(static_cast<std::uint8_t>(len));
        out.insert(out.end(), name.begin() + static_cast<std::ptrdiff_t>(pos),
                   name.begin() + static_cast<std::ptrdiff_t>(end));
        pos = end + 1;
    }
    out.push_back(0);
    if (out.size() > 255) throw ParseError("name longer than 255 octets");
    return out;
}

std::vector<std::uint8_t> encode(const Message& msg) {
    std::vector<std::uint8_t> out;
    out.reserve(64);
    put16(out, msg.id);
    std::uint16_t flags = 0;
    if (msg.response) flags |= 0x8000;
    flags |= static_cast<std::uint16_t>((msg.opcode & 0x0f) << 11);
    if (msg.authoritative) flags |= 0x0400;
    if (msg.truncated) flags |= 0x0200;
    if (msg.recursion_desired) flags |= 0x0100;
    if (msg.recursion_available) flags |= 0x0080;
    flags |= static_cast<std::uint16_t>(static_cast<std::uint8_t>(msg.rcode) & 0x0f);
    put16(out, flags);
    put16(out, static_cast<std::uint16_t>(msg.questions.size()));
    put16(out, static_cast<std::uint16_t>(msg.answers.size()));
    put16(out, 0);
    put16(out, 0);
    for (const auto& q : msg.questions) {
        const auto name = encode_name(q.name);
        out.insert(out.end(), name.begin(), name.end());
        put16(out, q.qtype);
        put16(out, q.qclass);
    }
    for (const auto& a : msg.answers) {
        if (!msg.questions.empty() && to_lower(a.name) == to_lower(msg.questions.front().name)) {
            put16(out, 0xc000 | kHeaderSize);
        } else {
            const auto name = encode_name(a.name);
            out.insert(out.end(), name.begin(), name.end());
        }
        put16(out, kTypeA);
        put16(out, kClassIn);
        put32(out, a.ttl);
        put16(out, 4);
        put32(out, a.address.value());
    }
    return out;
}

std::vector<std::uint8_t> encode_query(std::uint16_t id, std::string_view qname) {
    Message msg;
    msg.id = id;
    msg.recursion_desired = true;
    msg.questions.push_back({std::string(qname), kTypeA, kClassIn});
    return encode(msg);
}

std::vector<std::uint8_t> encode_formerr(std::uint16_t id) {
    Message msg;
    msg.id = id;
    msg.response = true;
    msg.recursion_desired = false;
    msg.rcode = Rcode::FormErr;
    return encode(msg);
}

Message decode(std::span<const std::uint8_t> wire) {
    Reader r(wire);
    Message msg;
    msg.id = r.u16();
    const std::uint16_t flags = r.u16();
    msg.response = flags & 0x8000;
    msg.opcode = static_cast<std::uint8_t>((flags >> 11) & 0x0f);
    msg.authoritative = flags & 0x0400;
    msg.truncated = flags & 0x0200;
    msg.recursion_desired = flags & 0x0100;
    msg.recursion_available = flags & 0x0080;
    msg.rcode = static_cast<Rcode>(flags & 0x0f);
    const std::uint16_t qd = r.u16();
    const std::uint16_t an = r.u16();
    r.u16();  // authority and additional sections are not interpreted
    r.u16();
    for (std::uint16_t i = 0; i < qd; ++i) {
        Question q;
        q.name = r.name();
        q.qtype = r.u16();
        q.qclass = r.u16();
        msg.questions.push_back(std::move(q));
    }
    for (std::uint16_t i = 0; i < an; ++i) {
        std::string name = r.name();
        const std::uint16_t type = r.u16();
        const std::uint16_t klass = r.u16();
        const std::uint32_t ttl = r.u32();
        const std::uint16_t rdlen = r.u16();
        if (type == kTypeA && klass == kClassIn) {
            if (rdlen != 4) throw ParseError("A record with rdlength " + std::to_string(rdlen));
            msg.answers.push_back({std::move(name), ttl, Ipv4Address(r.u32())});
        } else {
            r.skip(rdlen);
            ++msg.skipped_records;
        }
    }
    return msg;
}

std::optional<std::uint16_t> peek_id(std::span<const std::uint8_t> wire) noexcept {
    if (wire.size() < kHeaderSize) return std::nullopt;
    return static_cast<std::uint16_t>((wire[0] << 8) | wire[1]);
}

}  // namespace blockscope::dns
