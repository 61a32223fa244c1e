//! Plain-text channel dump of one drop, for offline inspection.
//!
//! ```text
//! fpcsim-channel-dump 1
//! ports <M> rbs <N> users <U> sectors <S>
//! L <user> <sector> <los 0|1> <pathloss> <shadowing> <o2i> <element_gain> <attenuation>   (U·S lines)
//! H <user> <sector> <rb> <re_0> <im_0> ... <re_M-1> <im_M-1>                          (U·S·N lines)
//! ```
//!
//! Records are row-major: user, then sector, then RB. Losses are in dB;
//! channel coefficients include the large-scale gain. Numbers use Rust's
//! shortest round-trip formatting, so reading the file back is lossless.

use std::io::{BufRead, Write};

use crate::campaign::engine::{realize_drop, sector_channels, Network};
use crate::{Result, SimError, C64};

pub const MAGIC: &str = "fpcsim-channel-dump 1";

/// Large-scale record of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRecord {
    pub user: usize,
    pub sector: usize,
    pub los: bool,
    pub pathloss_db: f64,
    pub shadowing_db: f64,
    pub o2i_db: f64,
    pub element_gain_db: f64,
    pub attenuation_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDump {
    pub ports: usize,
    pub rbs: usize,
    pub users: usize,
    pub sectors: usize,
    pub links: Vec<LinkRecord>,
    /// `users × sectors × rbs × ports`, row-major.
    pub h: Vec<C64>,
}

impl ChannelDump {
    /// Realizes `drop` and collects every link's large-scale state and channel.
    pub fn capture(net: &Network, master_seed: u64, drop: u64) -> Result<Self> {
        let real = realize_drop(net, master_seed, drop)?;
        let (users, sectors) = (real.users.len(), net.sectors());
        let (rbs, ports) = (net.scenario.radio.rb_count, net.array.ports);
        let per_sector: Vec<_> = (0..sectors).map(|s| sector_channels(net, master_seed, &real, s)).collect();
        let mut links = Vec::with_capacity(users * sectors);
        let mut h = Vec::with_capacity(users * sectors * rbs * ports);
        for u in 0..users {
            for (s, ch) in per_sector.iter().enumerate() {
                let l = real.link(u, s, sectors);
                links.push(LinkRecord {
                    user: u,
                    sector: s,
                    los: l.los,
                    pathloss_db: l.pathloss,
                    shadowing_db: l.shadowing,
                    o2i_db: l.o2i_loss,
                    element_gain_db: l.element_gain,
                    attenuation_db: l.attenuation,
                });
                for n in 0..rbs {
                    h.extend_from_slice(ch.row(u, n));
                }
            }
        }
        Ok(Self { ports, rbs, users, sectors, links, h })
    }

    pub fn channel(&self, user: usize, sector: usize, rb: usize) -> &[C64] {
        let start = ((user * self.sectors + sector) * self.rbs + rb) * self.ports;
        &self.h[start..start + self.ports]
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "ports {} rbs {} users {} sectors {}", self.ports, self.rbs, self.users, self.sectors)?;
        for l in &self.links {
            writeln!(
                w,
                "L {} {} {} {} {} {} {} {}",
                l.user,
                l.sector,
                u8::from(l.los),
                l.pathloss_db,
                l.shadowing_db,
                l.o2i_db,
                l.element_gain_db,
                l.attenuation_db
            )?;
        }
        for u in 0..self.users {
            for s in 0..self.sectors {
                for n in 0..self.rbs {
                    write!(w, "H {u} {s} {n}")?;
                    for c in self.channel(u, s, n) {
                        write!(w, " {} {}", c.re, c.im)?;
                    }
                    writeln!(w)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let bad = |msg: &str| SimError::config(format!("channel dump: {msg}"));
        let mut lines = r.lines();
        let mut next = || -> Result<String> { lines.next().ok_or_else(|| bad("truncated"))?.map_err(Into::into) };
        if next()? != MAGIC {
            return Err(bad("missing header"));
        }
        let dims: Vec<usize> = next()?
            .split_whitespace()
            .skip(1)
            .step_by(2)
            .map(|t| t.parse().map_err(|_| bad("bad dimensions")))
            .collect::<Result<_>>()?;
        let [ports, rbs, users, sectors] = dims[..] else {
            return Err(bad("bad dimensions"));
        };
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad("bad number"));
        let mut links = Vec::with_capacity(users * sectors);
        for _ in 0..users * sectors {
            let line = next()?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 9 || t[0] != "L" {
                return Err(bad("bad link record"));
            }
            links.push(LinkRecord {
                user: t[1].parse().map_err(|_| bad("bad index"))?,
                sector: t[2].parse().map_err(|_| bad("bad index"))?,
                los: t[3] == "1",
                pathloss_db: num(t[4])?,
                shadowing_db: num(t[5])?,
                o2i_db: num(t[6])?,
                element_gain_db: num(t[7])?,
                attenuation_db: num(t[8])?,
            });
        }
        let mut h = Vec::with_capacity(users * sectors * rbs * ports);
        for _ in 0..users * sectors * rbs {
            let line = next()?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 4 + 2 * ports || t[0] != "H" {
                return Err(bad("bad channel record"));
            }
            for pair in t[4..].chunks(2) {
                h.push(C64::new(num(pair[0])?, num(pair[1])?));
            }
        }
        Ok(Self { ports, rbs, users, sectors, links, h })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::CampaignConfig;

    #[test]
    fn text_round_trip_is_lossless() {
        let cfg = CampaignConfig::from_pairs([("layout.sites", "1"), ("array.m", "8"), ("sim.k", "2"), ("sim.rbs", "2")]).unwrap();
        let net = Network::new(&cfg.scenario).unwrap();
        let dump = ChannelDump::capture(&net, 3, 0).unwrap();
        let mut buf = Vec::new();
        dump.write_to(&mut buf).unwrap();
        let back = ChannelDump::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, dump);
        let l = &dump.links[0];
        assert!((l.pathloss_db + l.shadowing_db + l.o2i_db - l.element_gain_db - l.attenuation_db).abs() < 1e-9);
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(ChannelDump::read_from("hello\n".as_bytes()).is_err());
        assert!(ChannelDump::read_from(format!("{MAGIC}\nports 2 rbs 1 users 1 sectors 1\n").as_bytes()).is_err());
    }
}
