//! Named strategy registries. Each algorithm family (triangle splitters,
//! swap tie-break rules, intersection semantics, scan modes) keeps one of
//! these, seeded with the built-in variants and open for extension.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    items: RwLock<BTreeMap<String, Arc<T>>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Registry<T> {
        Registry {
            kind,
            items: RwLock::new(BTreeMap::new()),
        }
    }

    /// Returns the previous entry under the same name, if any.
    pub fn register(&self, name: &str, item: Arc<T>) -> Option<Arc<T>> {
        self.items
            .write()
            .expect("registry lock poisoned")
            .insert(name.to_string(), item)
    }

    pub fn get(&self, name: &str) -> Option<Arc<T>> {
        self.items
            .read()
            .expect("registry lock poisoned")
            .get(name)
            .cloned()
    }

    pub fn names(&self) -> Vec<String> {
        self.items
            .read()
            .expect("registry lock poisoned")
            .keys()
            .cloned()
            .collect()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    /// Like [`Registry::get`] with an error message listing the choices.
    pub fn lookup(&self, name: &str) -> Result<Arc<T>, String> {
        self.get(name).ok_or_else(|| {
            format!(
                "unknown {} '{}'; available: {}",
                self.kind,
                name,
                self.names().join(", ")
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Send + Sync {
        fn greet(&self) -> String;
    }

    struct Hello;
    impl Greeter for Hello {
        fn greet(&self) -> String {
            "hello".into()
        }
    }

    #[test]
    fn register_and_lookup() {
        let r: Registry<dyn Greeter> = Registry::new("greeter");
        assert!(r.register("hello", Arc::new(Hello)).is_none());
        assert_eq!(r.get("hello").unwrap().greet(), "hello");
        assert_eq!(r.names(), vec!["hello".to_string()]);
        let err = r.lookup("nope").err().unwrap();
        assert!(err.contains("available: hello"));
    }
}
