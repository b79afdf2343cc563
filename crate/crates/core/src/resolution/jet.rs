//! Second-order jets `c0 + c1 ε + c2 ε^2` and the local chart equations of `Y`
//! and of its blow-up along `W`, evaluated on jets.

use crate::fibration::{Chart, ModelExt};
use crate::gf::{Elem, Field};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Jet(pub [Elem; 3]);

impl Jet {
    pub fn constant(c: Elem) -> Jet {
        Jet([c, Elem::ZERO, Elem::ZERO])
    }

    pub fn linear(c: Elem, d: Elem) -> Jet {
        Jet([c, d, Elem::ZERO])
    }

    pub fn add(self, f: &Field, o: Jet) -> Jet {
        Jet([f.add(self.0[0], o.0[0]), f.add(self.0[1], o.0[1]), f.add(self.0[2], o.0[2])])
    }

    pub fn sub(self, f: &Field, o: Jet) -> Jet {
        Jet([f.sub(self.0[0], o.0[0]), f.sub(self.0[1], o.0[1]), f.sub(self.0[2], o.0[2])])
    }

    pub fn mul(self, f: &Field, o: Jet) -> Jet {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        Jet([
            f.mul(a0, b0),
            f.add(f.mul(a0, b1), f.mul(a1, b0)),
            f.add(f.add(f.mul(a0, b2), f.mul(a1, b1)), f.mul(a2, b0)),
        ])
    }

    pub fn scale(self, f: &Field, s: Elem) -> Jet {
        Jet(self.0.map(|c| f.mul(c, s)))
    }

    pub fn square(self, f: &Field) -> Jet {
        self.mul(f, self)
    }
}

/// A local chart of `Y` or of `Bl_W Y`, in six affine coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalChart {
    /// Base chart and the fibre coordinate set to 1. Coordinates are the two
    /// affine base coordinates followed by the four remaining fibre coordinates
    /// in index order.
    Y { chart: Chart, one: usize },
    /// `Bl_W Y` near `y`-directions in the `U_z`, `x3 = 1` chart:
    /// `(y, v1, w, y0, y1, y4)` with `x = y v1`, `x2 = w`, `x_i = y y_i`.
    WBlowY,
    /// `(x, v2, w, y0, y1, y4)` with `y = x v2`, `x2 = w`, `x_i = x y_i`.
    WBlowX,
}

fn k_product(model: &ModelExt, p: &[Jet; 3]) -> Jet {
    let f = &model.field;
    model.lines[2..].iter().fold(Jet::constant(Elem::ONE), |acc, l| {
        let v = p[0].scale(f, l.b).add(f, p[1].scale(f, l.c)).add(f, p[2].scale(f, l.d));
        acc.mul(f, v)
    })
}

impl LocalChart {
    /// Homogeneous base point of the chart coordinates.
    pub fn base_point(&self, u: &[Jet; 6]) -> [Jet; 3] {
        let one = Jet::constant(Elem::ONE);
        match self {
            LocalChart::Y { chart: Chart::Uy, .. } => [u[0], one, u[1]],
            LocalChart::Y { chart: Chart::Ux, .. } => [one, u[0], u[1]],
            LocalChart::Y { chart: Chart::Uz, .. } => [u[0], u[1], one],
            // base point is only used through G, which the evaluators handle
            LocalChart::WBlowY | LocalChart::WBlowX => [u[0], u[0], one],
        }
    }

    pub fn eval(&self, model: &ModelExt, u: &[Jet; 6]) -> Jet {
        let f = &model.field;
        let a = model.a;
        match *self {
            LocalChart::Y { chart, one } => {
                let p = self.base_point(u);
                let fv = match chart {
                    Chart::Uy => p[0],
                    Chart::Ux => p[1],
                    Chart::Uz => p[0].mul(f, p[1]),
                };
                let g = k_product(model, &p);
                let mut x = [Jet::constant(Elem::ONE); 5];
                let mut k = 2;
                for (i, xi) in x.iter_mut().enumerate() {
                    if i != one {
                        *xi = u[k];
                        k += 1;
                    }
                }
                let t0 = x[0].square(f);
                let t1 = x[1].square(f).scale(f, a);
                let t2 = fv.mul(f, x[2].square(f).sub(f, x[3].square(f).scale(f, a)));
                let t4 = g.mul(f, x[4].square(f));
                t0.sub(f, t1).sub(f, t2).sub(f, t4)
            }
            LocalChart::WBlowY | LocalChart::WBlowX => {
                let (lead, v) = (u[0], u[1]);
                let w = u[2];
                let one = Jet::constant(Elem::ONE);
                let p = if *self == LocalChart::WBlowY {
                    [lead.mul(f, v), lead, one]
                } else {
                    [lead, lead.mul(f, v), one]
                };
                let g = k_product(model, &p);
                let conic = w.square(f).sub(f, Jet::constant(a));
                u[3].square(f)
                    .sub(f, u[4].square(f).scale(f, a))
                    .sub(f, v.mul(f, conic))
                    .sub(f, g.mul(f, u[5].square(f)))
            }
        }
    }

    /// `F(c + ε w)` up to second order.
    pub fn jet_at(&self, model: &ModelExt, c: &[Elem; 6], w: &[Elem; 6]) -> Jet {
        let u: [Jet; 6] = std::array::from_fn(|i| Jet::linear(c[i], w[i]));
        self.eval(model, &u)
    }

    pub fn value(&self, model: &ModelExt, c: &[Elem; 6]) -> Elem {
        self.jet_at(model, c, &[Elem::ZERO; 6]).0[0]
    }

    pub fn gradient(&self, model: &ModelExt, c: &[Elem; 6]) -> [Elem; 6] {
        std::array::from_fn(|i| {
            let mut w = [Elem::ZERO; 6];
            w[i] = Elem::ONE;
            self.jet_at(model, c, &w).0[1]
        })
    }

    /// Symmetric matrix `M` with `[ε^2] F(c + ε w) = w^T M w`.
    pub fn hessian(&self, model: &ModelExt, c: &[Elem; 6]) -> [[Elem; 6]; 6] {
        let f = &model.field;
        let unit = |i: usize| {
            let mut w = [Elem::ZERO; 6];
            w[i] = Elem::ONE;
            w
        };
        let diag: [Elem; 6] = std::array::from_fn(|i| self.jet_at(model, c, &unit(i)).0[2]);
        let half = f.inv(f.from_i64(2)).expect("odd characteristic");
        let mut m = [[Elem::ZERO; 6]; 6];
        for i in 0..6 {
            m[i][i] = diag[i];
            for j in i + 1..6 {
                let mut w = unit(i);
                w[j] = Elem::ONE;
                let b = self.jet_at(model, c, &w).0[2];
                let off = f.mul(f.sub(f.sub(b, diag[i]), diag[j]), half);
                m[i][j] = off;
                m[j][i] = off;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Witness;
    use crate::fibration::ModelSpec;
    use rand::{Rng, SeedableRng};

    fn model() -> ModelExt {
        let w: Witness = "5^2; 2; 1,2,6; 10,2,14".parse().unwrap();
        let f = w.field().unwrap();
        ModelSpec::new(&f, f.smallest_nonsquare(), w.l1, w.l2).unwrap().over(1).unwrap()
    }

    #[test]
    fn blowup_chart_is_strict_transform() {
        // F'(y, v1, w, y_i) * y^2 equals F on U_z with x3 = 1 at x = y v1, x_i = y y_i.
        let m = model();
        let f = m.field.clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let ychart = LocalChart::Y { chart: Chart::Uz, one: 3 };
        for _ in 0..200 {
            let u: [Elem; 6] = std::array::from_fn(|_| f.random(&mut rng));
            for (bl, lead_is_y) in [(LocalChart::WBlowY, true), (LocalChart::WBlowX, false)] {
                let (lead, v) = (u[0], u[1]);
                let (x, y) = if lead_is_y { (f.mul(lead, v), lead) } else { (lead, f.mul(lead, v)) };
                let c = [x, y, f.mul(lead, u[3]), f.mul(lead, u[4]), u[2], f.mul(lead, u[5])];
                let lhs = f.mul(bl.value(&m, &u), f.square(lead));
                assert_eq!(lhs, ychart.value(&m, &c));
            }
        }
    }

    #[test]
    fn hessian_reproduces_second_order_term() {
        let m = model();
        let f = m.field.clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let ch = LocalChart::Y { chart: Chart::Uy, one: 4 };
        for _ in 0..50 {
            let c: [Elem; 6] = std::array::from_fn(|_| f.random(&mut rng));
            let h = ch.hessian(&m, &c);
            let w: [Elem; 6] = std::array::from_fn(|_| f.random(&mut rng));
            let mut s = Elem::ZERO;
            for i in 0..6 {
                for j in 0..6 {
                    s = f.add(s, f.mul(f.mul(w[i], h[i][j]), w[j]));
                }
            }
            assert_eq!(s, ch.jet_at(&m, &c, &w).0[2]);
            let _ = rng.gen::<u8>();
        }
    }
}
