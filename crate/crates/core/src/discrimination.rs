//! The discrimination matrix and the DP / ODP quantities computed from it.
//!
//! Every cell `g((a_i, a_j), y_l)` is evaluated once when the matrix is built.
//! Selection then works only with stored numbers: the `max_yd` row caches, for
//! each assertion pair, the best score reached by the selected variables, so an
//! ODP is one subtraction and one comparison per pair.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::model::{pair_count, pair_index, KnowledgeBase};

/// Absolute tolerance for every DP/ODP comparison.
pub const TOLERANCE: f64 = 1e-9;

/// Label of the cached column-maximum row in CSV dumps.
pub const MAX_YD_LABEL: &str = "Max Yd";

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationMatrix {
    variables: Vec<String>,
    objects: Vec<String>,
    pairs: Vec<(usize, usize)>,
    /// variables × pairs, row-major
    cells: Vec<f64>,
    max_yd: Vec<f64>,
    selected: Vec<usize>,
}

impl DiscriminationMatrix {
    /// Evaluates `measure` once per (variable, pair) cell.
    pub fn build(kb: &KnowledgeBase, measure: Measure) -> Result<Self> {
        if kb.n_pairs() == 0 {
            return Err(Error::NothingToDiscriminate);
        }
        let pairs = kb.pairs();
        let k = pairs.len();
        let mut cells = Vec::with_capacity(kb.n_variables() * k);
        for (l, spec) in kb.variables().iter().enumerate() {
            for &(i, j) in &pairs {
                let u = &kb.assertions()[i].values[l];
                let v = &kb.assertions()[j].values[l];
                cells.push(measure.score(u, v, spec)?);
            }
        }
        Ok(DiscriminationMatrix {
            variables: kb.variable_names(),
            objects: kb.assertion_names(),
            pairs,
            cells,
            max_yd: vec![0.0; k],
            selected: Vec::new(),
        })
    }

    /// Matrix with precomputed cells; `rows[l][p]` is the score of variable
    /// `l` on the `p`-th pair in lexicographic order.
    pub fn from_rows(variables: Vec<String>, objects: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = pair_count(objects.len());
        if k == 0 {
            return Err(Error::NothingToDiscriminate);
        }
        if variables.is_empty() || rows.len() != variables.len() {
            return Err(Error::invalid(format!(
                "{} rows for {} variables",
                rows.len(),
                variables.len()
            )));
        }
        let mut cells = Vec::with_capacity(variables.len() * k);
        for (name, row) in variables.iter().zip(&rows) {
            if row.len() != k {
                return Err(Error::invalid(format!(
                    "row `{name}` has {} cells, expected {k}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(Error::invalid(format!("row `{name}` has cell {bad} outside [0, 1]")));
            }
            cells.extend_from_slice(row);
        }
        Ok(DiscriminationMatrix {
            variables,
            objects: objects.clone(),
            pairs: pair_index(objects.len()),
            cells,
            max_yd: vec![0.0; k],
            selected: Vec::new(),
        })
    }

    /// Boolean view: a cell becomes 1 when it reached full discrimination,
    /// 0 otherwise. For positive-measure value sets a partial score of 1 means
    /// disjoint sets, so this is the `comp` matrix.
    pub fn to_boolean(&self) -> DiscriminationMatrix {
        let cells = self
            .cells
            .iter()
            .map(|&c| if c >= 1.0 - TOLERANCE { 1.0 } else { 0.0 })
            .collect();
        DiscriminationMatrix {
            variables: self.variables.clone(),
            objects: self.objects.clone(),
            pairs: self.pairs.clone(),
            cells,
            max_yd: vec![0.0; self.pairs.len()],
            selected: Vec::new(),
        }
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variables
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn row(&self, l: usize) -> &[f64] {
        let k = self.pairs.len();
        &self.cells[l * k..(l + 1) * k]
    }

    pub fn cell(&self, l: usize, p: usize) -> f64 {
        self.cells[l * self.pairs.len() + p]
    }

    pub fn max_yd(&self) -> &[f64] {
        &self.max_yd
    }

    /// Selected variables in insertion order.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn is_selected(&self, l: usize) -> bool {
        self.selected.contains(&l)
    }

    fn name(&self, l: usize) -> String {
        self.variables.get(l).cloned().unwrap_or_else(|| l.to_string())
    }

    fn check_index(&self, l: usize) -> Result<()> {
        if l < self.variables.len() {
            Ok(())
        } else {
            Err(Error::invalid(format!("variable index {l} out of range")))
        }
    }

    /// DP of a single variable: its row sum.
    pub fn dp_variable(&self, l: usize) -> f64 {
        self.row(l).iter().sum()
    }

    /// DP of a variable set: per pair, the best score within the set, summed.
    pub fn dp_set(&self, set: &[usize]) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        (0..self.pairs.len())
            .map(|p| set.iter().map(|&l| self.cell(l, p)).fold(0.0, f64::max))
            .sum()
    }

    /// DP of all variables, the stopping target.
    pub fn dp_total(&self) -> f64 {
        (0..self.pairs.len())
            .map(|p| (0..self.variables.len()).map(|l| self.cell(l, p)).fold(0.0, f64::max))
            .sum()
    }

    /// DP of the current selection, read off the cached row.
    pub fn dp_selected(&self) -> f64 {
        self.max_yd.iter().sum()
    }

    /// ODP of an unselected variable against the current selection, using the
    /// cached `max_yd` row.
    pub fn odp(&self, l: usize) -> Result<f64> {
        self.check_index(l)?;
        if self.is_selected(l) {
            return Err(Error::AlreadySelected(self.name(l)));
        }
        Ok(self
            .row(l)
            .iter()
            .zip(&self.max_yd)
            .map(|(&c, &m)| (c - m).max(0.0))
            .sum())
    }

    /// ODP of `l` against an arbitrary set, rescanning the set's rows.
    pub fn odp_against(&self, l: usize, set: &[usize]) -> f64 {
        (0..self.pairs.len())
            .map(|p| {
                let best = set.iter().filter(|&&q| q != l).map(|&q| self.cell(q, p)).fold(0.0, f64::max);
                (self.cell(l, p) - best).max(0.0)
            })
            .sum()
    }

    /// Adds `l` to the selection and folds its row into `max_yd`.
    pub fn update_max_yd(&mut self, l: usize) -> Result<()> {
        self.check_index(l)?;
        if self.is_selected(l) {
            return Err(Error::AlreadySelected(self.name(l)));
        }
        let k = self.pairs.len();
        let row = &self.cells[l * k..(l + 1) * k];
        for (m, &c) in self.max_yd.iter_mut().zip(row) {
            *m = m.max(c);
        }
        self.selected.push(l);
        Ok(())
    }

    /// Removes `l` from the selection and rebuilds `max_yd` from the
    /// remaining selected rows.
    pub fn deselect(&mut self, l: usize) -> Result<()> {
        let pos = self
            .selected
            .iter()
            .position(|&s| s == l)
            .ok_or_else(|| Error::invalid(format!("variable `{}` is not selected", self.name(l))))?;
        self.selected.remove(pos);
        self.max_yd.iter_mut().for_each(|m| *m = 0.0);
        let k = self.pairs.len();
        for &s in &self.selected {
            for (m, &c) in self.max_yd.iter_mut().zip(&self.cells[s * k..(s + 1) * k]) {
                *m = m.max(c);
            }
        }
        Ok(())
    }

    /// ODP of a selected variable against the rest of the selection.
    pub fn redundancy_margin(&self, l: usize) -> f64 {
        self.odp_against(l, &self.selected)
    }

    /// Variables that discriminate some pair strictly better than every other
    /// variable does.
    pub fn indispensables(&self) -> Vec<usize> {
        let n = self.variables.len();
        (0..n)
            .filter(|&l| {
                (0..self.pairs.len()).any(|p| {
                    let own = self.cell(l, p);
                    let others = (0..n).filter(|&q| q != l).map(|q| self.cell(q, p)).fold(0.0, f64::max);
                    own > 0.0 && own - others > TOLERANCE
                })
            })
            .collect()
    }

    /// Both sides of `DP(Yp ∪ {l}) = DP(Yp) + ODP(l, Yp)`.
    pub fn property1_check(&self, set: &[usize], l: usize) -> Result<(f64, f64)> {
        self.check_index(l)?;
        if set.contains(&l) {
            return Err(Error::AlreadySelected(self.name(l)));
        }
        let mut with_l = set.to_vec();
        with_l.push(l);
        Ok((self.dp_set(&with_l), self.dp_set(set) + self.odp_against(l, set)))
    }

    pub fn pair_label(&self, p: usize) -> String {
        let (i, j) = self.pairs[p];
        format!("({},{})", self.objects[i], self.objects[j])
    }

    /// CSV dump: a header of pair labels, one row per variable, then the
    /// `Max Yd` row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["variable".to_string()];
        header.extend((0..self.pairs.len()).map(|p| self.pair_label(p)));
        w.write_record(&header)?;
        for (l, name) in self.variables.iter().enumerate() {
            let mut rec = vec![name.clone()];
            rec.extend(self.row(l).iter().map(|c| c.to_string()));
            w.write_record(&rec)?;
        }
        let mut rec = vec![MAX_YD_LABEL.to_string()];
        rec.extend(self.max_yd.iter().map(|c| c.to_string()));
        w.write_record(&rec)?;
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Loads a dump written by [`write_csv`](Self::write_csv). The `Max Yd`
    /// row, if present, is ignored: the loaded matrix starts with an empty
    /// selection.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers()?.clone();
        let mut objects: Vec<String> = Vec::new();
        let mut pair_names = Vec::new();
        for label in header.iter().skip(1) {
            let (a, b) = parse_pair_label(label)?;
            for x in [&a, &b] {
                if !objects.contains(x) {
                    objects.push(x.clone());
                }
            }
            pair_names.push((a, b));
        }
        let expected: Vec<(String, String)> = pair_index(objects.len())
            .into_iter()
            .map(|(i, j)| (objects[i].clone(), objects[j].clone()))
            .collect();
        if expected != pair_names {
            return Err(Error::Parse(
                "matrix columns must list every assertion pair once, in lexicographic order".into(),
            ));
        }
        let mut variables = Vec::new();
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let name = rec.get(0).unwrap_or_default().to_string();
            if name == MAX_YD_LABEL {
                continue;
            }
            let row = rec
                .iter()
                .skip(1)
                .map(|x| {
                    x.trim().parse::<f64>().map_err(|_| {
                        Error::Parse(format!("row {} (`{name}`): `{x}` is not a number", line + 2))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            variables.push(name);
            rows.push(row);
        }
        DiscriminationMatrix::from_rows(variables, objects, rows)
    }
}

fn parse_pair_label(label: &str) -> Result<(String, String)> {
    let inner = label
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("column `{label}` is not a pair label `(a,b)`")))?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("column `{label}` is not a pair label `(a,b)`")))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> DiscriminationMatrix {
        DiscriminationMatrix::from_rows(
            (1..=5).map(|i| format!("y_{i}")).collect(),
            (1..=4).map(|i| format!("a_{i}")).collect(),
            vec![
                vec![0.7, 0.0, 0.1, 0.1, 0.0, 0.1],
                vec![0.0, 0.6, 0.1, 0.7, 0.0, 0.5],
                vec![0.0, 0.3, 0.5, 0.3, 0.6, 0.1],
                vec![0.0, 0.6, 0.1, 0.7, 0.6, 0.5],
                vec![0.0, 0.3, 0.1, 0.3, 0.2, 0.3],
            ],
        )
        .unwrap()
    }

    #[test]
    fn row_sums() {
        let m = table1();
        assert!((m.dp_variable(3) - 2.5).abs() < 1e-12);
        assert!((m.dp_total() - 3.6).abs() < 1e-12);
        assert!((m.dp_set(&[0, 2]) - 2.5).abs() < 1e-12);
        assert_eq!(m.dp_set(&[]), 0.0);
    }

    #[test]
    fn double_select_is_rejected() {
        let mut m = table1();
        m.update_max_yd(0).unwrap();
        assert!(matches!(m.update_max_yd(0), Err(Error::AlreadySelected(_))));
        assert!(matches!(m.odp(0), Err(Error::AlreadySelected(_))));
    }

    #[test]
    fn deselect_rebuilds_max_yd() {
        let mut m = table1();
        m.update_max_yd(0).unwrap();
        m.update_max_yd(2).unwrap();
        m.deselect(0).unwrap();
        assert_eq!(m.max_yd(), m.row(2));
        assert_eq!(m.selected(), &[2]);
        assert!(m.deselect(4).is_err());
    }

    #[test]
    fn zero_row_leaves_max_yd() {
        let mut m = DiscriminationMatrix::from_rows(
            vec!["x".into(), "z".into()],
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0.2, 0.5, 0.1], vec![0.0, 0.0, 0.0]],
        )
        .unwrap();
        m.update_max_yd(0).unwrap();
        let before = m.max_yd().to_vec();
        m.update_max_yd(1).unwrap();
        assert_eq!(m.max_yd(), &before[..]);
    }

    #[test]
    fn identical_rows_are_not_indispensable() {
        let m = DiscriminationMatrix::from_rows(
            vec!["x".into(), "y".into()],
            vec!["a".into(), "b".into()],
            vec![vec![0.4], vec![0.4]],
        )
        .unwrap();
        assert!(m.indispensables().is_empty());
        let single = DiscriminationMatrix::from_rows(vec!["x".into()], vec!["a".into(), "b".into()], vec![vec![0.4]])
            .unwrap();
        assert_eq!(single.indispensables(), vec![0]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(DiscriminationMatrix::from_rows(vec!["x".into()], vec!["a".into()], vec![vec![]]).is_err());
        assert!(DiscriminationMatrix::from_rows(
            vec!["x".into()],
            vec!["a".into(), "b".into()],
            vec![vec![1.5]]
        )
        .is_err());
    }

    #[test]
    fn csv_round_trip() {
        let m = table1();
        let text = m.to_csv_string().unwrap();
        assert!(text.starts_with("variable,\"(a_1,a_2)\""));
        let back = DiscriminationMatrix::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn csv_rejects_shuffled_columns() {
        let text = "variable,\"(a,c)\",\"(a,b)\",\"(b,c)\"\nx,0,0,0\n";
        assert!(DiscriminationMatrix::read_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn boolean_view_thresholds_at_one() {
        let m = DiscriminationMatrix::from_rows(
            vec!["x".into()],
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![1.0, 0.99, 0.0]],
        )
        .unwrap();
        assert_eq!(m.to_boolean().row(0), &[1.0, 0.0, 0.0]);
    }
}
