//! OpenAI-compatible chat-completions provider.

use std::time::Duration;

use serde_json::{json, Value};

use super::{BackendError, ChatReply, ChatRequest, ModelBackend};

pub struct HttpBackend {
    name: String,
    endpoint: String,
    model: String,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(
        name: &str,
        endpoint: &str,
        model: &str,
        api_key: String,
    ) -> Result<HttpBackend, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(300))
            .build()
            .map_err(|e| BackendError::Config(e.to_string()))?;
        Ok(HttpBackend {
            name: name.to_string(),
            endpoint: endpoint.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key,
            client,
        })
    }

    fn payload(&self, request: &ChatRequest) -> Value {
        let mut content = vec![json!({"type": "text", "text": request.user})];
        for image in &request.images {
            content.push(json!({
                "type": "image_url",
                "image_url": {
                    "url": format!("data:{};base64,{}", image.mime, image.base64)
                }
            }));
        }
        let mut messages = Vec::new();
        if let Some(system) = &request.system {
            messages.push(json!({"role": "system", "content": system}));
        }
        messages.push(json!({"role": "user", "content": content}));
        json!({
            "model": self.model,
            "messages": messages,
            "temperature": request.temperature,
        })
    }
}

impl ModelBackend for HttpBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn chat(&self, request: &ChatRequest) -> Result<ChatReply, BackendError> {
        let response = self
            .client
            .post(format!("{}/chat/completions", self.endpoint))
            .bearer_auth(&self.api_key)
            .json(&self.payload(request))
            .send()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status();
        let body = response
            .text()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(BackendError::Http {
                status: status.as_u16(),
                body: body.chars().take(500).collect(),
            });
        }
        let value: Value = serde_json::from_str(&body)
            .map_err(|e| BackendError::Protocol(format!("bad response JSON: {e}")))?;
        let message = &value["choices"][0]["message"];
        let text = message["content"]
            .as_str()
            .ok_or_else(|| BackendError::Protocol("reply has no message content".into()))?
            .to_string();
        let thinking = message["reasoning_content"]
            .as_str()
            .map(|s| s.to_string());
        Ok(ChatReply { thinking, text })
    }
}
