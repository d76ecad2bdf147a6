use std::fmt;

/// A finite 0th-homology bar. Births are always 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub death_grade: usize,
    pub death_length: f64,
}

impl Interval {
    pub fn birth(&self) -> f64 {
        0.0
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Barcode {
    /// Finite bars in filtration order (nondecreasing death).
    pub finite: Vec<Interval>,
    /// Components that never die; 1 for any nonempty cloud.
    pub essential_count: usize,
}

impl Barcode {
    pub fn death_grades(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.finite.iter().map(|i| i.death_grade).collect();
        g.sort_unstable();
        g
    }

    pub fn death_lengths(&self) -> Vec<f64> {
        let mut l: Vec<f64> = self.finite.iter().map(|i| i.death_length).collect();
        l.sort_unstable_by(f64::total_cmp);
        l
    }

    /// Text form, one bar per line as `birth,death_length,death_grade`.
    /// Essential bars print as `0,inf,-` when requested.
    pub fn display(&self, show_essential: bool) -> BarcodeDisplay<'_> {
        BarcodeDisplay {
            barcode: self,
            show_essential,
        }
    }
}

pub struct BarcodeDisplay<'a> {
    barcode: &'a Barcode,
    show_essential: bool,
}

impl fmt::Display for BarcodeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bar in &self.barcode.finite {
            writeln!(f, "0,{},{}", bar.death_length, bar.death_grade)?;
        }
        if self.show_essential {
            for _ in 0..self.barcode.essential_count {
                writeln!(f, "0,inf,-")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format() {
        let b = Barcode {
            finite: vec![
                Interval {
                    death_grade: 1,
                    death_length: 1.0,
                },
                Interval {
                    death_grade: 2,
                    death_length: 2.5,
                },
            ],
            essential_count: 1,
        };
        assert_eq!(b.display(false).to_string(), "0,1,1\n0,2.5,2\n");
        assert_eq!(b.display(true).to_string(), "0,1,1\n0,2.5,2\n0,inf,-\n");
    }
}
