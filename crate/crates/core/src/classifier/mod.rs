//! GRU text classifier pooled on the final hidden state.

mod model;
mod report;

pub use model::{
    argmax, classify_forward, evaluate_classifier, train_classifier, ClassifierConfig,
    ClassifierWeights, GruClassifier,
};
pub use report::ClsReport;
