use crate::quaternion::Quaternion;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.c);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

impl FromIterator<f64> for Compensated {
    fn from_iter<T: IntoIterator<Item = f64>>(iter: T) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<Compensated>().value()
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedQ([Compensated; 4]);

impl CompensatedQ {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, q: Quaternion) {
        for (acc, x) in self.0.iter_mut().zip(q.to_array()) {
            acc.add(x);
        }
    }

    pub fn value(&self) -> Quaternion {
        Quaternion::new(self.0[0].value(), self.0[1].value(), self.0[2].value(), self.0[3].value())
    }
}
