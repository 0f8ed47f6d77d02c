/*
 * Structured text configuration for parameter sets.
 *
 * A configuration is a YAML mapping. Keys follow the row names of the
 * parameter tables; durations are microseconds, rates Mbps, sizes bytes:
 *
 *   wifi:
 *     preset: table2-wifi        # optional, applied first
 *     sigma: 9
 *     AIFSN: 2
 *     SIFS: 16
 *     DIFS: 34                   # derived from SIFS + AIFSN*sigma if omitted
 *     CW_min_w: 16
 *     CW_max_w: 1024
 *     M_w: 7
 *     BR: 6
 *     Max_TXOP_w: 5484
 *     AMPDU_exp: 7
 *     N_w: 64
 *     D_Data: 1500
 *     T_PHY: 40
 *     T_PHY_response: 0
 *     D_MPDU: 4
 *     D_MAC: 34
 *     D_LLC: 8
 *     D_BlockACK: 32
 *     ACK_Tout: 50
 *     beacon_interval: 102400
 *     tail_pad: symbol           # or none
 *   laa:
 *     preset: table5-class4
 *     class: 4
 *     sigma: 9
 *     T_f: 16
 *     m_l: 7
 *     CW_min_l: 16
 *     CW_max_l: 1024
 *     M_l: 10
 *     TXOP_l_coexistence: 8000
 *     TXOP_l_sharing: 10000
 *     T_LAAslot: 500
 *     LBT_CCA: A2
 *
 * Unknown keys are rejected so typos do not silently fall back to defaults.
 */

#ifndef UNLSHARE_CONFIG_HPP
#define UNLSHARE_CONFIG_HPP

#include "unlshare/params.hpp"

#include <string>
#include <string_view>

namespace unlshare {

struct ProfileSet {
  WifiMacProfile wifi = wifi_preset("table2-wifi");
  LaaClassProfile laa = laa_preset("table4-class1");
};

/// Parses a document with optional `wifi:` and `laa:` sections.
ProfileSet parse_profiles(std::string_view text);

WifiMacProfile parse_wifi_profile(std::string_view text);
LaaClassProfile parse_laa_profile(std::string_view text);

/// Emits every key, so the output round-trips through the parsers.
std::string to_config_text(const WifiMacProfile& profile);
std::string to_config_text(const LaaClassProfile& profile);
std::string to_config_text(const ProfileSet& profiles);

} // namespace unlshare

#endif /* UNLSHARE_CONFIG_HPP */
