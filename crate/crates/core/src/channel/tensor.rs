use crate::C64;

/// Channels from every user of a drop to one sector on every RB.
///
/// Laid out `(user, rb, port)` row-major so that `h_{k,j,n}` is a contiguous
/// row vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorChannels {
    pub sector: usize,
    users: usize,
    rbs: usize,
    ports: usize,
    data: Vec<C64>,
}

impl SectorChannels {
    pub fn zeros(sector: usize, users: usize, rbs: usize, ports: usize) -> Self {
        Self { sector, users, rbs, ports, data: vec![C64::new(0.0, 0.0); users * rbs * ports] }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn rbs(&self) -> usize {
        self.rbs
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    #[inline]
    fn offset(&self, user: usize, rb: usize) -> usize {
        (user * self.rbs + rb) * self.ports
    }

    #[inline]
    pub fn row(&self, user: usize, rb: usize) -> &[C64] {
        let o = self.offset(user, rb);
        &self.data[o..o + self.ports]
    }

    #[inline]
    pub fn row_mut(&mut self, user: usize, rb: usize) -> &mut [C64] {
        let o = self.offset(user, rb);
        &mut self.data[o..o + self.ports]
    }

    /// Channel energy of `user` summed over all RBs and ports.
    pub fn energy(&self, user: usize) -> f64 {
        let o = self.offset(user, 0);
        self.data[o..o + self.rbs * self.ports].iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Full per-(user, sector, RB) channel set. Only materialized for small
/// networks and for file dumps; the simulator streams one sector at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTensor {
    pub sectors: Vec<SectorChannels>,
}

impl ChannelTensor {
    pub fn new(sectors: Vec<SectorChannels>) -> Self {
        Self { sectors }
    }

    /// `h_{user, sector, rb}`.
    pub fn row(&self, user: usize, sector: usize, rb: usize) -> &[C64] {
        self.sectors[sector].row(user, rb)
    }
}
