//! Gaussian discriminant analysis from first principles.
//!
//! This crate implements the classical family of classifiers built on
//! Gaussian class-conditional densities — linear discriminant analysis (LDA),
//! quadratic discriminant analysis (QDA), Gaussian naive Bayes, and the
//! plug-in Bayes classifier with exact or mixture likelihoods — together with
//! the machinery around them: parameter estimation, the optimal univariate
//! decision boundary, likelihood-ratio classification, whitening and
//! Mahalanobis geometry, Fisher discriminant directions, EM mixture fitting,
//! seeded synthetic data generators, and decision-region rasterization.
//!
//! Everything is dense, double precision, and sized for the low-dimensional
//! regime (a handful of features) where these methods are typically applied
//! and where exactness is cheap.
//!
//! A quick taste — fit QDA on a toy dataset and classify a point:
//!
//! ```
//! use discrim::classifier::{Family, FitOptions, FittedClassifier};
//! use discrim::dataset::LabeledDataset;
//!
//! let ds = LabeledDataset::new(vec![
//!     (vec![0.0, 0.1], 0),
//!     (vec![0.2, -0.1], 0),
//!     (vec![-0.1, 0.0], 0),
//!     (vec![5.0, 5.1], 1),
//!     (vec![5.2, 4.9], 1),
//!     (vec![4.9, 5.0], 1),
//! ])?;
//! let clf = FittedClassifier::fit(&ds, Family::Qda, &FitOptions::default())?;
//! assert_eq!(clf.predict(&[0.1, 0.0])?, 0);
//! assert_eq!(clf.predict(&[5.0, 5.0])?, 1);
//! # Ok::<(), discrim::Error>(())
//! ```
//!
//! The long-form guide lives in the `book/` directory of the repository and
//! is mirrored into [`guide`] so its examples compile and run as doctests.

pub mod boundary;
pub mod classifier;
pub mod dataset;
pub mod estimation;
pub mod experiment;
pub mod gaussian;
pub mod grid;
pub mod guide;
pub mod linalg;
pub mod mixture;
pub mod rng;
pub mod scenario;
pub mod subspace;

mod error;

pub use error::{Error, Result};
