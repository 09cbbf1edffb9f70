use std::collections::HashMap;
use std::sync::Arc;

use super::functions::FunctionRegistry;
use super::value::Value;
use super::InterpError;

/// Spike variables that steer generation.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub nalt_ans: usize,
    pub n_repeat: usize,
    pub rseed: u64,
    pub duedate: String,
}

impl Default for Config {
    fn default() -> Self {
        Self { nalt_ans: 5, n_repeat: 1, rseed: 0, duedate: String::new() }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Environment {
    pub vars: HashMap<String, Value>,
    pub config: Config,
    pub(crate) functions: Arc<FunctionRegistry>,
}

fn integer_config(name: &str, v: &Value) -> Result<f64, InterpError> {
    let x = v.scalar().map_err(|_| InterpError::BadConfig(format!("{name} must be a number")))?;
    if x.fract() != 0.0 || !x.is_finite() {
        return Err(InterpError::BadConfig(format!("{name} must be an integer, got {v}")));
    }
    Ok(x)
}

impl Environment {
    pub fn new(functions: Arc<FunctionRegistry>) -> Self {
        Self { vars: HashMap::new(), config: Config::default(), functions }
    }

    pub fn functions(&self) -> &FunctionRegistry {
        &self.functions
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.vars.get(name)
    }

    pub fn set(&mut self, name: impl Into<String>, v: Value) {
        self.vars.insert(name.into(), v);
    }

    fn text_var(&self, name: &str) -> Option<String> {
        self.vars.get(name).map(|v| v.to_string())
    }

    /// The `answer` variable rendered as text.
    pub fn answer(&self) -> Option<String> {
        self.text_var("answer")
    }

    /// The `out` variable rendered as text.
    pub fn out(&self) -> Option<String> {
        self.text_var("out")
    }

    pub fn tf(&self) -> Option<bool> {
        self.vars.get("tf").map(Value::truthy)
    }

    /// Copies the config into the script-visible variables.
    pub fn publish_config(&mut self) {
        let c = self.config.clone();
        self.set("NAltAns", Value::Num(c.nalt_ans as f64));
        self.set("NRepeat", Value::Num(c.n_repeat as f64));
        self.set("rseed", Value::Num(c.rseed as f64));
        self.set("duedate", Value::Str(c.duedate));
    }

    /// Reads the config variables back after a script has run.
    pub fn sync_config(&mut self) -> Result<(), InterpError> {
        if let Some(v) = self.vars.get("NAltAns") {
            let n = integer_config("NAltAns", v)?;
            if !(2.0..=8.0).contains(&n) {
                return Err(InterpError::BadConfig(format!("NAltAns must be in 2..8, got {n}")));
            }
            self.config.nalt_ans = n as usize;
        }
        if let Some(v) = self.vars.get("NRepeat") {
            let n = integer_config("NRepeat", v)?;
            if n < 1.0 {
                return Err(InterpError::BadConfig(format!("NRepeat must be at least 1, got {n}")));
            }
            self.config.n_repeat = n as usize;
        }
        if let Some(v) = self.vars.get("rseed") {
            let n = integer_config("rseed", v)?;
            if n < 0.0 {
                return Err(InterpError::BadConfig(format!("rseed must be non-negative, got {n}")));
            }
            self.config.rseed = n as u64;
        }
        if let Some(v) = self.vars.get("duedate") {
            self.config.duedate = v.to_string();
        }
        Ok(())
    }
}
