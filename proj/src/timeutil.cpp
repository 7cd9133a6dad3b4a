#include "ossrisk/timeutil.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace ossrisk {

namespace {

bool read_int(std::string_view& s, std::size_t digits, int& out) {
    if (s.size() < digits) return false;
    for (std::size_t i = 0; i < digits; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    std::from_chars(s.data(), s.data() + digits, out);
    s.remove_prefix(digits);
    return true;
}

bool consume(std::string_view& s, char ch) {
    if (s.empty() || s.front() != ch) return false;
    s.remove_prefix(1);
    return true;
}

} // namespace

std::optional<Timestamp> parse_iso8601(std::string_view s) {
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (!read_int(s, 4, y) || !consume(s, '-') || !read_int(s, 2, mo) || !consume(s, '-') || !read_int(s, 2, d))
        return std::nullopt;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;

    long offset_seconds = 0;
    if (!s.empty()) {
        if (!consume(s, 'T') && !consume(s, ' ')) return std::nullopt;
        if (!read_int(s, 2, h) || !consume(s, ':') || !read_int(s, 2, mi)) return std::nullopt;
        if (consume(s, ':')) {
            if (!read_int(s, 2, sec)) return std::nullopt;
            if (consume(s, '.')) {
                std::size_t n = 0;
                while (n < s.size() && std::isdigit(static_cast<unsigned char>(s[n]))) ++n;
                if (n == 0) return std::nullopt;
                s.remove_prefix(n);
            }
        }
        if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
        if (consume(s, 'Z')) {
        } else if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
            int sign = s.front() == '-' ? -1 : 1;
            s.remove_prefix(1);
            int oh = 0, om = 0;
            if (!read_int(s, 2, oh)) return std::nullopt;
            consume(s, ':');
            if (!read_int(s, 2, om) || oh > 23 || om > 59) return std::nullopt;
            offset_seconds = sign * (oh * 3600L + om * 60L);
        }
        if (!s.empty()) return std::nullopt;
    }
    sys_seconds t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
    return t - seconds{offset_seconds};
}

std::string format_iso8601(Timestamp t) {
    using namespace std::chrono;
    sys_days day_part = floor<days>(t);
    year_month_day ymd{day_part};
    hh_mm_ss<seconds> tod{t - day_part};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                  static_cast<long long>(tod.seconds().count()));
    return buf;
}

bool TimeWindow::contains(Timestamp t) const {
    if (start && t < *start) return false;
    if (end && t >= *end) return false;
    return true;
}

std::optional<double> TimeWindow::days() const {
    if (!bounded()) return std::nullopt;
    return std::chrono::duration<double, std::ratio<86400>>(*end - *start).count();
}

} // namespace ossrisk
